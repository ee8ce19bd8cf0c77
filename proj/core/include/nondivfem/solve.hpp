#pragma once

#include "nondivfem/gmres.hpp"
#include "nondivfem/hessian.hpp"
#include "nondivfem/problem.hpp"
#include "nondivfem/system.hpp"

#include <optional>
#include <string>
#include <vector>

namespace nondivfem {

enum class Scheme { RecoveryCG, RecoveryDG, NSZ };

/// "recovery-cg", "recovery-dg", "nsz".
std::string to_string(Scheme scheme);
Scheme parse_scheme(const std::string& name);

struct SolveOptions {
  int degree{2};
  Scheme scheme{Scheme::RecoveryCG};
  /// Unset penalties take the defaults chosen from the measured Cordes epsilon.
  std::optional<double> eta1;
  std::optional<double> eta2;
  GmresOptions gmres;
  bool use_preconditioner{true};
  /// Overrides the quadrature degree used for A and f.
  std::optional<int> quad_degree;
  bool want_hessian{false};
};

struct Solution {
  FEFunction u_h;
  std::optional<HessianFunctions> hessian;
  SolveReport report;
  CordesInfo cordes;
  Penalties penalties;
  int quad_degree{0};
  std::vector<std::string> warnings;
};

/// eta1 = eta2 = 0 when epsilon >= 0.5, otherwise eta1 = 1, eta2 = 0. NSZ always
/// defaults to eta1 = 1.
Penalties default_penalties(Scheme scheme, double epsilon);

/// Quadrature degree for coefficient-dependent integrals.
int coefficient_quadrature_degree(const ProblemData& problem, int degree);

/// Assembles and solves one discrete problem. Throws CordesViolated or
/// ConfigError up front; GMRES non-convergence is reported in Solution::report.
Solution solve_problem(const ProblemData& problem, std::shared_ptr<const Mesh> mesh, const SolveOptions& options);

}  // namespace nondivfem
