#include "nondivfem/gmres.hpp"

#include <cmath>

namespace nondivfem {

std::pair<Vector, SolveReport> gmres(const LinearAction& apply, const Vector& b, const LinearAction& precond,
                                     const GmresOptions& options) {
  if (options.max_iter < 1) throw ConfigError("gmres: max_iter must be >= 1");
  const Eigen::Index n = b.size();
  SolveReport report;
  Vector x = Vector::Zero(n);
  const double beta = b.norm();
  const double target = std::max(options.tol_abs, options.tol_rel * beta);
  report.residual_history.push_back(beta);
  if (beta <= target) {
    report.converged = true;
    report.final_true_residual = beta;
    return {x, report};
  }

  const int m = options.max_iter;
  std::vector<Vector> basis;
  basis.reserve(static_cast<std::size_t>(std::min<Eigen::Index>(m, n) + 1));
  basis.push_back(b / beta);
  DenseMatrix h = DenseMatrix::Zero(m + 1, m);
  Vector cs = Vector::Zero(m), sn = Vector::Zero(m), g = Vector::Zero(m + 1);
  g[0] = beta;

  int k = 0;
  for (; k < m; ++k) {
    const Vector z = precond ? precond(basis.back()) : basis.back();
    Vector w = apply(z);
    const double w_norm0 = w.norm();
    for (int i = 0; i <= k; ++i) {
      h(i, k) = basis[static_cast<std::size_t>(i)].dot(w);
      w -= h(i, k) * basis[static_cast<std::size_t>(i)];
    }
    h(k + 1, k) = w.norm();
    for (int i = 0; i < k; ++i) {
      const double t = cs[i] * h(i, k) + sn[i] * h(i + 1, k);
      h(i + 1, k) = -sn[i] * h(i, k) + cs[i] * h(i + 1, k);
      h(i, k) = t;
    }
    const double r = std::hypot(h(k, k), h(k + 1, k));
    const double sub = h(k + 1, k);
    if (r == 0.0) {
      report.breakdown = "zero Krylov direction at iteration " + std::to_string(k + 1);
      break;
    }
    cs[k] = h(k, k) / r;
    sn[k] = sub / r;
    h(k, k) = r;
    h(k + 1, k) = 0.0;
    g[k + 1] = -sn[k] * g[k];
    g[k] = cs[k] * g[k];
    report.residual_history.push_back(std::abs(g[k + 1]));
    if (std::abs(g[k + 1]) <= target) {
      ++k;
      report.converged = true;
      break;
    }
    if (sub <= 1e-14 * std::max(w_norm0, 1e-300)) {
      // Lucky breakdown: the Krylov space is invariant and the least-squares solution is exact.
      ++k;
      report.breakdown = "Krylov space became invariant at iteration " + std::to_string(k);
      break;
    }
    basis.push_back(w / sub);
  }

  if (k > 0) {
    const Vector y = h.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    Vector v = Vector::Zero(n);
    for (int i = 0; i < k; ++i) v += y[i] * basis[static_cast<std::size_t>(i)];
    x = precond ? precond(v) : v;
  }
  report.iterations = k;
  report.final_true_residual = (b - apply(x)).norm();
  if (!report.converged && report.final_true_residual <= target) report.converged = true;
  return {x, report};
}

}  // namespace nondivfem
