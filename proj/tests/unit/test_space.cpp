#include "nondivfem/quadrature.hpp"
#include "nondivfem/space.hpp"

#include "dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace nondivfem;
using nondivfem::testing::unit_square;

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

// int_{ref triangle} x^a y^b = a! b! / (a + b + 2)!
double monomial_integral(int a, int b) { return factorial(a) * factorial(b) / factorial(a + b + 2); }

}  // namespace

TEST(Quadrature, CentroidRule) {
  const QuadratureRule q = quadrature(1);
  ASSERT_EQ(q.size(), 1u);
  EXPECT_NEAR(q.weights[0], 0.5, 1e-16);
  EXPECT_NEAR(q.points[0].x, 1.0 / 3, 1e-16);
  EXPECT_NEAR(q.points[0].y, 1.0 / 3, 1e-16);
}

TEST(Quadrature, DegreeTwoIntegratesXY) {
  const QuadratureRule q = quadrature(2);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * q.points[i].x * q.points[i].y;
  EXPECT_NEAR(s, 1.0 / 24, 1e-15);
}

TEST(Quadrature, PositiveWeightsSumToHalf) {
  for (int d = 1; d <= 20; ++d) {
    const QuadratureRule q = quadrature(d);
    EXPECT_NEAR(std::accumulate(q.weights.begin(), q.weights.end(), 0.0), 0.5, 1e-14) << d;
    for (double w : q.weights) EXPECT_GT(w, 0.0) << d;
    for (const Point2& p : q.points) {
      EXPECT_GT(p.x, 0.0);
      EXPECT_GT(p.y, 0.0);
      EXPECT_LT(p.x + p.y, 1.0);
    }
  }
}

TEST(Quadrature, ExactForMonomials) {
  for (int d = 1; d <= 20; ++d) {
    const QuadratureRule q = quadrature(d);
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; a + b <= d; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) s += q.weights[i] * std::pow(q.points[i].x, a) * std::pow(q.points[i].y, b);
        EXPECT_NEAR(s, monomial_integral(a, b), 1e-14) << "degree " << d << " monomial " << a << "," << b;
      }
    }
  }
}

TEST(Quadrature, GaussLegendreOnUnitInterval) {
  for (int n = 1; n <= 10; ++n) {
    const LineRule r = gauss_legendre(n);
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.points.size(); ++i) s += r.weights[i] * std::pow(r.points[i], k);
      EXPECT_NEAR(s, 1.0 / (k + 1), 1e-14) << n << " " << k;
    }
  }
}

class ReferenceElementTest : public ::testing::TestWithParam<int> {};

TEST_P(ReferenceElementTest, KroneckerProperty) {
  const ReferenceElement e(GetParam());
  EXPECT_EQ(e.num_basis(), (GetParam() + 1) * (GetParam() + 2) / 2);
  const Tabulation t = e.tabulate(e.nodes());
  EXPECT_LT((t.value - DenseMatrix::Identity(e.num_basis(), e.num_basis())).cwiseAbs().maxCoeff(), 1e-12);
}

TEST_P(ReferenceElementTest, PartitionOfUnity) {
  const ReferenceElement e(GetParam());
  const QuadratureRule q = quadrature(8);
  const Tabulation t = e.tabulate(q.points);
  for (Eigen::Index i = 0; i < t.value.rows(); ++i) {
    EXPECT_NEAR(t.value.row(i).sum(), 1.0, 1e-12);
    EXPECT_NEAR(t.dx.row(i).sum(), 0.0, 1e-10);
    EXPECT_NEAR(t.dy.row(i).sum(), 0.0, 1e-10);
    EXPECT_NEAR(t.dxx.row(i).sum(), 0.0, 1e-8);
  }
}

TEST_P(ReferenceElementTest, DerivativesMatchFiniteDifferences) {
  const ReferenceElement e(GetParam());
  const Point2 x{0.21, 0.33};
  const double h = 1e-5;
  const std::vector<Point2> pts{x, {x.x + h, x.y}, {x.x - h, x.y}, {x.x, x.y + h}, {x.x, x.y - h}};
  const Tabulation t = e.tabulate(pts);
  for (int i = 0; i < e.num_basis(); ++i) {
    EXPECT_NEAR(t.dx(0, i), (t.value(1, i) - t.value(2, i)) / (2 * h), 1e-7);
    EXPECT_NEAR(t.dy(0, i), (t.value(3, i) - t.value(4, i)) / (2 * h), 1e-7);
    EXPECT_NEAR(t.dxx(0, i), (t.dx(1, i) - t.dx(2, i)) / (2 * h), 1e-6);
    EXPECT_NEAR(t.dxy(0, i), (t.dx(3, i) - t.dx(4, i)) / (2 * h), 1e-6);
    EXPECT_NEAR(t.dyy(0, i), (t.dy(3, i) - t.dy(4, i)) / (2 * h), 1e-6);
  }
}

INSTANTIATE_TEST_SUITE_P(Degrees, ReferenceElementTest, ::testing::Values(1, 2, 3, 4, 5));

TEST(FunctionSpace, DofCountsOnTwoCells) {
  const auto mesh = unit_square(1);
  EXPECT_EQ(build_space(mesh, 2, Continuity::CG)->num_dofs(), 9);
  EXPECT_EQ(build_space(mesh, 2, Continuity::DG)->num_dofs(), 12);
  EXPECT_EQ(build_space(mesh, 2, Continuity::CG, ValueShape::Matrix)->num_dofs(), 36);
  EXPECT_EQ(build_space(mesh, 2, Continuity::DG, ValueShape::Matrix)->num_dofs(), 48);
}

TEST(FunctionSpace, CgDofCountFormula) {
  const auto mesh = std::make_shared<const Mesh>(bisect_uniform(build_rect_mesh(0, 1, 0, 1, 3, 2), 2));
  for (int p = 1; p <= 5; ++p) {
    const Index expected = mesh->num_vertices() + (p - 1) * mesh->num_facets() + (p - 1) * (p - 2) / 2 * mesh->num_cells();
    EXPECT_EQ(build_space(mesh, p, Continuity::CG)->num_dofs(), expected);
    EXPECT_EQ(build_space(mesh, p, Continuity::DG)->num_dofs(), mesh->num_cells() * (p + 1) * (p + 2) / 2);
  }
}

TEST(FunctionSpace, BoundaryDofs) {
  const auto mesh = unit_square(1);
  EXPECT_EQ(boundary_dofs(*build_space(mesh, 1, Continuity::CG)).size(), 4u);
  const auto v2 = build_space(mesh, 2, Continuity::CG);
  const auto b = boundary_dofs(*v2);
  EXPECT_EQ(b.size(), 8u);
  for (Index d : b) {
    const Point2 x = v2->dof_coordinates()[static_cast<std::size_t>(d)];
    EXPECT_TRUE(x.x == 0 || x.x == 1 || x.y == 0 || x.y == 1);
  }
  EXPECT_THROW(boundary_dofs(*build_space(mesh, 2, Continuity::DG)), ConfigError);
}

TEST(FunctionSpace, DofCoordinatesAreNodes) {
  const auto mesh = unit_square(3);
  const auto V = build_space(mesh, 3, Continuity::CG);
  for (Index c = 0; c < mesh->num_cells(); ++c) {
    const AffineMap map = affine_map(*mesh, c);
    const auto dofs = V->cell_dofs(c);
    for (int i = 0; i < V->dofs_per_cell(); ++i) {
      const Point2 x = map.to_physical(V->element().nodes()[static_cast<std::size_t>(i)]);
      EXPECT_LT(norm(x - V->dof_coordinates()[static_cast<std::size_t>(dofs[static_cast<std::size_t>(i)])]), 1e-14);
    }
  }
}

TEST(FunctionSpace, CgInterpolantIsSingleValued) {
  const auto mesh = std::make_shared<const Mesh>(bisect_uniform(build_rect_mesh(0, 1, 0, 1, 2, 2), 3));
  for (int p = 1; p <= 4; ++p) {
    const auto V = build_space(mesh, p, Continuity::CG);
    const FEFunction u = interpolate(V, [](Point2 x) { return std::sin(3 * x.x) * std::exp(x.y); });
    const LineRule line = gauss_legendre(3);
    for (Index f = 0; f < mesh->num_facets(); ++f) {
      if (mesh->is_boundary_facet(f)) continue;
      const FacetQuadrature fq = facet_quadrature(*mesh, f, line);
      const PointwiseValues a = evaluate_at(u, mesh->facet(f).cells[0], fq.points);
      const PointwiseValues b = evaluate_at(u, mesh->facet(f).cells[1], fq.points);
      for (std::size_t q = 0; q < fq.points.size(); ++q) EXPECT_NEAR(a.values[q], b.values[q], 1e-13);
    }
  }
}

TEST(FunctionSpace, InterpolationReproducesPolynomials) {
  const auto mesh = unit_square(2);
  for (int p = 1; p <= 5; ++p) {
    const auto V = build_space(mesh, p, Continuity::CG);
    auto poly = [p](Point2 x) { return std::pow(x.x + 2 * x.y, p) - 3 * x.x * x.y; };
    const FEFunction u = interpolate(V, [&](Point2 x) { return p >= 2 ? poly(x) : x.x + 2 * x.y; });
    const QuadratureRule q = quadrature(5);
    for (Index c = 0; c < mesh->num_cells(); ++c) {
      const PointwiseValues v = evaluate(u, c, q);
      for (std::size_t k = 0; k < q.size(); ++k) {
        const double expected = p >= 2 ? poly(v.points[k]) : v.points[k].x + 2 * v.points[k].y;
        EXPECT_NEAR(v.values[k], expected, 1e-11);
      }
    }
  }
}

TEST(FunctionSpace, PhysicalDerivatives) {
  // u = x^2 y on a distorted cell: check gradient and Hessian push-forward.
  const auto mesh = std::make_shared<const Mesh>(
      Mesh({{0.1, 0.2}, {1.3, 0.4}, {0.5, 1.1}}, {{0, 1, 2}}));
  const auto V = build_space(mesh, 3, Continuity::CG);
  const FEFunction u = interpolate(V, [](Point2 x) { return x.x * x.x * x.y; });
  const std::vector<Point2> pts{{0.6, 0.5}, {0.5, 0.8}};
  const PointwiseValues v = evaluate_at(u, 0, pts);
  for (std::size_t k = 0; k < pts.size(); ++k) {
    const Point2 x = pts[k];
    EXPECT_NEAR(v.gradients[k].x, 2 * x.x * x.y, 1e-12);
    EXPECT_NEAR(v.gradients[k].y, x.x * x.x, 1e-12);
    EXPECT_NEAR(v.hessians[k].xx, 2 * x.y, 1e-11);
    EXPECT_NEAR(v.hessians[k].xy, 2 * x.x, 1e-11);
    EXPECT_NEAR(v.hessians[k].yy, 0.0, 1e-11);
  }
}

TEST(FEFunction, LengthMustMatchSpace) {
  const auto V = build_space(unit_square(1), 2, Continuity::CG);
  EXPECT_THROW(FEFunction(V, Vector::Zero(5)), ConfigError);
  EXPECT_NO_THROW(FEFunction(V, Vector::Zero(9)));
}
