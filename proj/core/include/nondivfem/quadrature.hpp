#pragma once

#include "nondivfem/types.hpp"

#include <vector>

namespace nondivfem {

/// Quadrature on the reference triangle {(0,0), (1,0), (0,1)}.
///
/// Points are stored as reference coordinates (xi, eta); the barycentric
/// coordinates are (1 - xi - eta, xi, eta). Weights sum to 1/2.
struct QuadratureRule {
  int degree{0};
  std::vector<Point2> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Rule exact for polynomials up to `degree`. Symmetric rules with positive
/// weights are used up to degree 5, collapsed Gauss-Legendre products above.
QuadratureRule quadrature(int degree);

/// Collapsed tensor-product Gauss rule with n points per direction
/// (exact to degree 2n - 2).
QuadratureRule collapsed_gauss(int n);

/// Gauss-Legendre rule on [0, 1].
struct LineRule {
  std::vector<double> points;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n - 1.
LineRule gauss_legendre(int n);

/// Line rule exact to `degree`.
LineRule line_quadrature(int degree);

}  // namespace nondivfem
