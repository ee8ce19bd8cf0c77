#include "nondivfem/problem.hpp"

#include "nondivfem/quadrature.hpp"
#include "nondivfem/space.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>

namespace nondivfem {
namespace {

constexpr double kPi = std::numbers::pi;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

ProblemData with_forcing_from_exact(ProblemData p) {
  // f = A : D^2 u.
  p.forcing = [a = p.coefficient, h = p.exact->hessian](Point2 x) { return a(x).contract(h(x)); };
  return p;
}

std::string cordes_message(Point2 where, double ratio) {
  std::ostringstream os;
  os << "Cordes condition violated at (" << where.x << ", " << where.y << "): |A|_F^2/tr(A)^2 = " << ratio;
  return os.str();
}

}  // namespace

CordesViolated::CordesViolated(Point2 w, double r) : std::runtime_error(cordes_message(w, r)), where(w), ratio(r) {}

CordesInfo cordes_analyze(const ProblemData& problem, std::span<const Point2> sample_points) {
  CordesInfo info;
  info.min_eigenvalue = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (const Point2& x : sample_points) {
    const SymMatrix2 a = problem.coefficient(x);
    const double lmin = a.min_eigenvalue();
    info.min_eigenvalue = std::min(info.min_eigenvalue, lmin);
    const double tr = a.trace();
    const double ratio = tr > 0.0 ? a.frobenius_squared() / (tr * tr) : std::numeric_limits<double>::infinity();
    if (!(lmin > 0.0) || ratio >= 1.0) throw CordesViolated(x, ratio);
    if (ratio > worst) {
      worst = ratio;
      info.worst_point = x;
    }
  }
  if (sample_points.empty()) return info;
  info.worst_ratio = worst;
  // ratio <= 1 / (d - 1 + eps) with d = 2.
  info.epsilon = std::clamp(1.0 / worst - 1.0, std::numeric_limits<double>::min(), 1.0);
  return info;
}

std::vector<Point2> quadrature_points(const Mesh& mesh, int degree) {
  const QuadratureRule quad = quadrature(degree);
  std::vector<Point2> out;
  out.reserve(static_cast<std::size_t>(mesh.num_cells()) * quad.size());
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const AffineMap map = affine_map(mesh, c);
    for (const Point2& xi : quad.points) out.push_back(map.to_physical(xi));
  }
  return out;
}

ProblemData make_exp1(double kappa) {
  ProblemData p;
  p.name = "exp1";
  p.domain = {0.0, 1.0, 0.0, 1.0};
  p.coefficient = [kappa](Point2) { return SymMatrix2{1.0, kappa, 1.0}; };
  ExactSolution u;
  u.value = [](Point2 x) { return std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); };
  u.gradient = [](Point2 x) {
    const double sx = std::sin(2 * kPi * x.x), sy = std::sin(2 * kPi * x.y);
    const double cx = std::cos(2 * kPi * x.x), cy = std::cos(2 * kPi * x.y);
    return Point2{2 * kPi * cx * sy, 2 * kPi * sx * cy};
  };
  u.hessian = [](Point2 x) {
    const double sx = std::sin(2 * kPi * x.x), sy = std::sin(2 * kPi * x.y);
    const double cx = std::cos(2 * kPi * x.x), cy = std::cos(2 * kPi * x.y);
    const double k2 = 4 * kPi * kPi;
    return SymMatrix2{-k2 * sx * sy, k2 * cx * cy, -k2 * sx * sy};
  };
  p.exact = u;
  return with_forcing_from_exact(std::move(p));
}

ProblemData make_exp2(double alpha) {
  ProblemData p;
  p.name = "exp2";
  p.domain = {0.0, 1.0, 0.0, 1.0};
  p.coefficient = [](Point2) { return SymMatrix2{1.0, 0.0, 1.0}; };
  // v = r^alpha sin(2 phi) = 2 x y r^beta with beta = alpha - 2, w = (1-x)(1-y).
  const double beta = alpha - 2.0;
  struct Parts {
    double v, vx, vy, vxx, vxy, vyy;
  };
  auto parts = [alpha, beta](Point2 x) -> Parts {
    const double r2 = x.x * x.x + x.y * x.y;
    if (r2 == 0.0) return {0, 0, 0, 0, 0, 0};
    const double r = std::sqrt(r2);
    const double rb = std::pow(r, beta);
    const double rb2 = rb / r2;
    const double rb4 = rb2 / r2;
    const double X = x.x, Y = x.y;
    Parts q;
    q.v = std::pow(r, alpha) * 2.0 * X * Y / r2;
    q.vx = 2 * Y * rb + 2 * beta * X * X * Y * rb2;
    q.vy = 2 * X * rb + 2 * beta * X * Y * Y * rb2;
    q.vxx = 6 * beta * X * Y * rb2 + 2 * beta * (beta - 2) * X * X * X * Y * rb4;
    q.vyy = 6 * beta * X * Y * rb2 + 2 * beta * (beta - 2) * X * Y * Y * Y * rb4;
    q.vxy = 2 * (1 + beta) * rb + 2 * beta * (beta - 2) * X * X * Y * Y * rb4;
    return q;
  };
  ExactSolution u;
  u.value = [parts](Point2 x) { return parts(x).v * (1 - x.x) * (1 - x.y); };
  u.gradient = [parts](Point2 x) {
    const Parts q = parts(x);
    const double w = (1 - x.x) * (1 - x.y), wx = -(1 - x.y), wy = -(1 - x.x);
    return Point2{q.vx * w + q.v * wx, q.vy * w + q.v * wy};
  };
  u.hessian = [parts](Point2 x) {
    const Parts q = parts(x);
    const double w = (1 - x.x) * (1 - x.y), wx = -(1 - x.y), wy = -(1 - x.x);
    return SymMatrix2{q.vxx * w + 2 * q.vx * wx, q.vxy * w + q.vx * wy + q.vy * wx + q.v,
                      q.vyy * w + 2 * q.vy * wy};
  };
  p.exact = u;
  return with_forcing_from_exact(std::move(p));
}

ProblemData make_exp3() {
  ProblemData p;
  p.name = "exp3";
  p.domain = {-1.0, 1.0, -1.0, 1.0};
  // The jumps lie on the axes, which are cell edges of every mesh refined from a
  // structured (-1,1)^2 grid with an even cell count, so A is constant per cell.
  p.coefficient = [](Point2 x) { return SymMatrix2{2.0, sgn(x.x * x.y), 2.0}; };
  // g(t) = t (1 - e^{1-|t|}).
  auto g = [](double t) { return t * (1.0 - std::exp(1.0 - std::abs(t))); };
  auto g1 = [](double t) {
    const double e = std::exp(1.0 - std::abs(t));
    return 1.0 - e + std::abs(t) * e;
  };
  auto g2 = [](double t) { return sgn(t) * std::exp(1.0 - std::abs(t)) * (2.0 - std::abs(t)); };
  ExactSolution u;
  u.value = [g](Point2 x) { return g(x.x) * g(x.y); };
  u.gradient = [g, g1](Point2 x) { return Point2{g1(x.x) * g(x.y), g(x.x) * g1(x.y)}; };
  u.hessian = [g, g1, g2](Point2 x) {
    return SymMatrix2{g2(x.x) * g(x.y), g1(x.x) * g1(x.y), g(x.x) * g2(x.y)};
  };
  p.exact = u;
  return with_forcing_from_exact(std::move(p));
}

ProblemData make_exp4() {
  ProblemData p;
  p.name = "exp4";
  p.domain = {-1.0, 1.0, -1.0, 1.0};
  p.coefficient = [](Point2 x) {
    return SymMatrix2{0.02, 0.01, 1.0 + (x.x * x.x * x.x - x.y > 0.0 ? 1.0 : 0.0)};
  };
  p.forcing = [](Point2) { return -1.0; };
  p.discontinuous_coefficient = true;
  return p;
}

ProblemData make_constant_coefficient_polynomial(const SymMatrix2& a) {
  ProblemData p;
  p.name = "poly";
  p.domain = {0.0, 1.0, 0.0, 1.0};
  p.coefficient = [a](Point2) { return a; };
  ExactSolution u;
  u.value = [](Point2 x) { return x.x * (1 - x.x) * x.y * (1 - x.y); };
  u.gradient = [](Point2 x) {
    return Point2{(1 - 2 * x.x) * x.y * (1 - x.y), x.x * (1 - x.x) * (1 - 2 * x.y)};
  };
  u.hessian = [](Point2 x) {
    return SymMatrix2{-2 * x.y * (1 - x.y), (1 - 2 * x.x) * (1 - 2 * x.y), -2 * x.x * (1 - x.x)};
  };
  p.exact = u;
  return with_forcing_from_exact(std::move(p));
}

ProblemData make_poisson_polynomial() { return make_constant_coefficient_polynomial({1.0, 0.0, 1.0}); }

bool is_known_problem(const std::string& key) {
  return key == "exp1" || key == "exp2" || key == "exp3" || key == "exp4" || key == "poly";
}

ProblemData make_problem(const std::string& key, const ProblemParameters& params) {
  if (key == "exp1") return make_exp1(params.kappa);
  if (key == "exp2") return make_exp2(params.alpha);
  if (key == "exp3") return make_exp3();
  if (key == "exp4") return make_exp4();
  if (key == "poly") return make_poisson_polynomial();
  throw ConfigError("unknown experiment key '" + key + "'");
}

}  // namespace nondivfem
