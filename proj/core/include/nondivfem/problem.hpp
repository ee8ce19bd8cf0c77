#pragma once

#include "nondivfem/mesh.hpp"
#include "nondivfem/types.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nondivfem {

struct Rect {
  double x0{0.0}, x1{1.0}, y0{0.0}, y1{1.0};
  double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Manufactured solution with its first and second derivatives.
struct ExactSolution {
  std::function<double(Point2)> value;
  std::function<Point2(Point2)> gradient;
  std::function<SymMatrix2(Point2)> hessian;
};

/// Data of A : D^2 u = f in the domain, u = 0 on its boundary. Only the upper
/// triangle of A is specified, so A is symmetric by construction.
struct ProblemData {
  std::string name;
  Rect domain;
  std::function<SymMatrix2(Point2)> coefficient;
  std::function<double(Point2)> forcing;
  std::optional<ExactSolution> exact;
  /// True when A jumps inside cells of typical meshes (raise quadrature).
  bool discontinuous_coefficient{false};
};

/// gamma = trace(A) / |A|_F^2.
inline double normalization(const SymMatrix2& a) { return a.trace() / a.frobenius_squared(); }

struct CordesInfo {
  /// Largest epsilon in (0, 1] with |A|_F^2 / tr(A)^2 <= 1 / (1 + epsilon) at all samples.
  double epsilon{1.0};
  /// Smallest sampled eigenvalue of A.
  double min_eigenvalue{0.0};
  Point2 worst_point;
  double worst_ratio{0.5};
};

class CordesViolated : public std::runtime_error {
 public:
  CordesViolated(Point2 where, double ratio);
  Point2 where;
  double ratio;
};

/// Samples the Cordes ratio at the given points. Throws CordesViolated when
/// |A|_F^2 / tr(A)^2 >= 1 or A is not positive definite somewhere.
CordesInfo cordes_analyze(const ProblemData& problem, std::span<const Point2> sample_points);

/// Quadrature points of every cell, for sampling coefficients.
std::vector<Point2> quadrature_points(const Mesh& mesh, int degree);

// Problem catalog.

/// A = [[1, kappa], [kappa, 1]] on the unit square, u = sin(2 pi x) sin(2 pi y).
ProblemData make_exp1(double kappa);
/// Poisson problem on the unit square, u = r^alpha sin(2 phi) (1 - x)(1 - y).
ProblemData make_exp2(double alpha);
/// A = [[2, sgn(xy)], [sgn(xy), 2]] on (-1,1)^2,
/// u = x y (1 - e^{1-|x|})(1 - e^{1-|y|}).
ProblemData make_exp3();
/// A = [[0.02, 0.01], [0.01, 1 + 1_{x^3 - y > 0}]] on (-1,1)^2, f = -1.
ProblemData make_exp4();
/// Poisson problem on the unit square with polynomial solution x(1-x)y(1-y).
ProblemData make_poisson_polynomial();
/// Problem with constant coefficient A and polynomial solution x(1-x)y(1-y).
ProblemData make_constant_coefficient_polynomial(const SymMatrix2& a);

struct ProblemParameters {
  double kappa{0.5};
  double alpha{1.5};
};

/// Catalog lookup by key: exp1, exp2, exp3, exp4, poly.
ProblemData make_problem(const std::string& key, const ProblemParameters& params = {});
bool is_known_problem(const std::string& key);

}  // namespace nondivfem
