#pragma once

#include "nondivfem/types.hpp"

#include <functional>
#include <string>
#include <utility>
#include <vector>

namespace nondivfem {

using LinearAction = std::function<Vector(const Vector&)>;

struct SolveReport {
  int iterations{0};
  /// Residual norms ||b - A x_k||, one entry per iterate starting with x_0 = 0.
  std::vector<double> residual_history;
  bool converged{false};
  /// ||b - A x|| recomputed from the returned x.
  double final_true_residual{0.0};
  /// Non-empty when the Arnoldi process broke down before convergence.
  std::string breakdown;
};

struct GmresOptions {
  double tol_abs{1e-8};
  double tol_rel{1e-8};
  int max_iter{500};
};

/// Full GMRES with modified Gram-Schmidt and right preconditioning, started
/// from zero. Stops once the residual is at most max(tol_abs, tol_rel ||b||).
std::pair<Vector, SolveReport> gmres(const LinearAction& apply, const Vector& b, const LinearAction& precond = {},
                                     const GmresOptions& options = {});

}  // namespace nondivfem
