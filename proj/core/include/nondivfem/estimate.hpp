#pragma once

#include "nondivfem/problem.hpp"
#include "nondivfem/space.hpp"

#include <span>
#include <vector>

namespace nondivfem {

struct ErrorNorms {
  double l2{0.0};
  /// Full H1 norm of the error.
  double h1{0.0};
  /// Broken Hessian seminorm plus h_F^{-1}-weighted normal-gradient jumps on interior facets.
  double h2h{0.0};
  /// Broken Hessian seminorm alone.
  double hessian_broken{0.0};
};

ErrorNorms error_norms(const FEFunction& u_h, const ExactSolution& exact, int quad_degree);

/// sum_{F in F_T, interior} h_F^{-1} ||[grad u_h . n_F]||_F^2 for every cell.
/// Each interior facet counts for both neighbours.
std::vector<double> cell_jump_terms(const FEFunction& u_h);

/// Per-cell H2_h error: (||D^2(u - u_h)||_T^2 + cell_jump_terms)^{1/2}.
std::vector<double> local_h2h_errors(const FEFunction& u_h, const ExactSolution& exact, int quad_degree);

struct EstimatorField {
  std::vector<double> local;
  double global{0.0};
};

/// eta_T^2 = ||gamma f - gamma A : D^2 u_h||_T^2 + cell_jump_terms, eta = (sum eta_T^2)^{1/2}.
EstimatorField local_estimator(const FEFunction& u_h, const ProblemData& problem, int quad_degree);

/// rate_k = log(e_k / e_{k+1}) / log(h_k / h_{k+1}).
std::vector<double> eoc(std::span<const double> h, std::span<const double> errors);
/// Rates against dof counts in 2D: rate_k = -2 log(e_{k+1} / e_k) / log(N_{k+1} / N_k).
std::vector<double> eoc_dofs(std::span<const double> dofs, std::span<const double> errors);
/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace nondivfem
