#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace nondivfem {

using Index = int;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

inline constexpr int kDim = 2;

struct Point2 {
  double x{0.0};
  double y{0.0};

  friend Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend bool operator==(Point2 a, Point2 b) = default;

  double operator[](int i) const { return i == 0 ? x : y; }
};

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

/// Symmetric 2x2 matrix stored by its upper triangle.
struct SymMatrix2 {
  double xx{0.0};
  double xy{0.0};
  double yy{0.0};

  double operator()(int i, int j) const {
    if (i == 0 && j == 0) return xx;
    if (i == 1 && j == 1) return yy;
    return xy;
  }
  double trace() const { return xx + yy; }
  double frobenius_squared() const { return xx * xx + 2.0 * xy * xy + yy * yy; }
  double det() const { return xx * yy - xy * xy; }
  double min_eigenvalue() const {
    const double m = 0.5 * (xx + yy);
    const double d = std::hypot(0.5 * (xx - yy), xy);
    return m - d;
  }
  /// Frobenius product A : B.
  double contract(const SymMatrix2& b) const { return xx * b.xx + 2.0 * xy * b.xy + yy * b.yy; }

  friend SymMatrix2 operator*(double s, const SymMatrix2& a) { return {s * a.xx, s * a.xy, s * a.yy}; }
  friend SymMatrix2 operator-(const SymMatrix2& a, const SymMatrix2& b) {
    return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy};
  }
  friend SymMatrix2 operator+(const SymMatrix2& a, const SymMatrix2& b) {
    return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy};
  }
};

/// Raised for invalid arguments or inconsistent inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical kernel cannot proceed (singular factorization, ...).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nondivfem
