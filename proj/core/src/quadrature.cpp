#include "nondivfem/quadrature.hpp"

#include <numbers>

namespace nondivfem {
namespace {

void add_orbit3(QuadratureRule& q, double a, double w) {
  // Barycentric orbit (a, a, 1 - 2a).
  const double b = 1.0 - 2.0 * a;
  q.points.push_back({a, a});
  q.points.push_back({b, a});
  q.points.push_back({a, b});
  for (int k = 0; k < 3; ++k) q.weights.push_back(0.5 * w);
}

}  // namespace

LineRule gauss_legendre(int n) {
  if (n < 1) throw ConfigError("gauss_legendre: need at least one point");
  LineRule rule;
  rule.points.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pn = n == 1 ? x : p1;
      const double pnm1 = n == 1 ? 1.0 : p0;
      dp = n * (x * pn - pnm1) / (x * x - 1.0);
      const double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    const double pn = n == 1 ? x : p1;
    const double pnm1 = n == 1 ? 1.0 : p0;
    dp = n * (x * pn - pnm1) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    const auto lo = static_cast<std::size_t>(i);
    const auto hi = static_cast<std::size_t>(n - 1 - i);
    rule.points[lo] = 0.5 * (1.0 - x);
    rule.points[hi] = 0.5 * (1.0 + x);
    rule.weights[lo] = 0.5 * w;
    rule.weights[hi] = 0.5 * w;
  }
  return rule;
}

LineRule line_quadrature(int degree) { return gauss_legendre(std::max(1, degree / 2 + 1)); }

QuadratureRule collapsed_gauss(int n) {
  // Duffy map (s, t) -> (s (1 - t), t) with Jacobian (1 - t).
  const LineRule g = gauss_legendre(n);
  QuadratureRule q;
  q.degree = 2 * n - 2;
  for (std::size_t j = 0; j < g.points.size(); ++j) {
    for (std::size_t i = 0; i < g.points.size(); ++i) {
      const double s = g.points[i];
      const double t = g.points[j];
      q.points.push_back({s * (1.0 - t), t});
      q.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - t));
    }
  }
  return q;
}

QuadratureRule quadrature(int degree) {
  if (degree < 1) degree = 1;
  QuadratureRule q;
  switch (degree) {
    case 1:
      q.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      q.weights.push_back(0.5);
      break;
    case 2:
      add_orbit3(q, 1.0 / 6.0, 1.0 / 3.0);
      break;
    case 3:
    case 4:
      add_orbit3(q, 0.445948490915965, 0.223381589678011);
      add_orbit3(q, 0.091576213509771, 0.109951743655322);
      break;
    case 5:
      q.points.push_back({1.0 / 3.0, 1.0 / 3.0});
      q.weights.push_back(0.5 * 0.225);
      add_orbit3(q, 0.470142064105115, 0.132394152788506);
      add_orbit3(q, 0.101286507323456, 0.125939180544827);
      break;
    default: {
      // Exact to 2n - 2 >= degree.
      QuadratureRule g = collapsed_gauss((degree + 3) / 2);
      g.degree = degree;
      return g;
    }
  }
  q.degree = degree;
  return q;
}

}  // namespace nondivfem
