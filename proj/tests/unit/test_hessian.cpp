#include "nondivfem/hessian.hpp"

#include "dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace nondivfem;
using nondivfem::testing::dense;
using nondivfem::testing::l2_projection;
using nondivfem::testing::random_polynomial;
using nondivfem::testing::RandomPolynomial;
using nondivfem::testing::random_vector;
using nondivfem::testing::unit_square;

namespace {

constexpr double kPi = std::numbers::pi;

double component(const SymMatrix2& h, int i, int j) { return h(i, j); }

// Max deviation of a W function from a pointwise field at quadrature points.
double max_deviation(const FEFunction& w, const std::function<double(Point2)>& f) {
  const Mesh& mesh = w.space->mesh();
  const QuadratureRule q = quadrature(6);
  double err = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const PointwiseValues v = evaluate(w, c, q);
    for (std::size_t k = 0; k < q.size(); ++k) err = std::max(err, std::abs(v.values[k] - f(v.points[k])));
  }
  return err;
}

double l2_deviation(const FEFunction& w, const std::function<double(Point2)>& f) {
  const Mesh& mesh = w.space->mesh();
  const QuadratureRule q = quadrature(10);
  const Tabulation tab = w.space->element().tabulate(q.points);
  double s = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv = cell_values(tab, affine_map(mesh, c), q);
    const PointwiseValues v = evaluate(w, c, q);
    for (std::size_t k = 0; k < q.size(); ++k) s += cv.jxw[k] * std::pow(v.values[k] - f(v.points[k]), 2);
  }
  return std::sqrt(s);
}

std::shared_ptr<const Mesh> skewed_mesh() {
  return std::make_shared<const Mesh>(bisect(build_rect_mesh(0, 1, 0, 1, 2, 2), std::vector<Index>{1, 4}));
}

// Independent right-hand side: broken Hessian minus facet jump terms, assembled
// without integrating by parts.
Vector brute_force_rhs(const FunctionSpace& V, const FunctionSpace& W, const Vector& u, int i, int j) {
  const Mesh& mesh = V.mesh();
  Vector rhs = Vector::Zero(W.num_scalar_dofs());
  const QuadratureRule q = quadrature(2 * V.degree());
  const FEFunction uh(build_space(V.mesh_ptr(), V.degree(), Continuity::CG), u);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const PointwiseValues pv = evaluate(uh, c, q);
    const CellValues cw = values_at_physical(W.element(), mesh, c, pv.points);
    const double jac = std::abs(affine_map(mesh, c).det);
    for (std::size_t k = 0; k < q.size(); ++k) {
      for (int l = 0; l < W.dofs_per_cell(); ++l) {
        rhs[W.cell_dofs(c)[static_cast<std::size_t>(l)]] +=
            q.weights[k] * jac * component(pv.hessians[k], i, j) * cw.value(static_cast<Eigen::Index>(k), l);
      }
    }
  }
  const LineRule line = gauss_legendre(V.degree() + 1);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.is_boundary_facet(f)) continue;
    const FacetGeometry g = facet_geometry(mesh, f);
    const FacetQuadrature fq = facet_quadrature(mesh, f, line);
    const PointwiseValues um = evaluate_at(uh, *g.minus_cell, fq.points);
    const PointwiseValues up = evaluate_at(uh, g.plus_cell, fq.points);
    for (Index side : {*g.minus_cell, g.plus_cell}) {
      const CellValues cw = values_at_physical(W.element(), mesh, side, fq.points);
      // CG: continuous psi collects the full jump (d_i u^+ - d_i u^-) n_j, half from each side.
      // DG: each side sees ({d_i u} - d_i u_T) n_{T,j}, which is the same half jump.
      const double scale = 0.5;
      for (std::size_t k = 0; k < fq.points.size(); ++k) {
        const double jump = (up.gradients[k][i] - um.gradients[k][i]) * g.normal[j];
        for (int l = 0; l < W.dofs_per_cell(); ++l) {
          rhs[W.cell_dofs(side)[static_cast<std::size_t>(l)]] +=
              scale * fq.weights[k] * jump * cw.value(static_cast<Eigen::Index>(k), l);
        }
      }
    }
  }
  return rhs;
}

}  // namespace

TEST(MassMatrix, ReferenceTriangleP1) {
  const auto mesh = std::make_shared<const Mesh>(Mesh({{0, 0}, {1, 0}, {0, 1}}, {{0, 1, 2}}));
  const DenseMatrix m = dense(assemble_mass_W(*build_space(mesh, 1, Continuity::CG)));
  DenseMatrix expected(3, 3);
  expected << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  expected *= 0.5 / 12;
  EXPECT_LT((m - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(MassMatrix, TotalSumIsArea) {
  const auto mesh = skewed_mesh();
  for (int p = 1; p <= 4; ++p) {
    const SparseMatrix m = assemble_mass_W(*build_space(mesh, p, Continuity::CG));
    EXPECT_NEAR(m.sum(), 1.0, 1e-12);
    EXPECT_LT((dense(m) - dense(m).transpose()).cwiseAbs().maxCoeff(), 1e-13 * dense(m).cwiseAbs().maxCoeff());
  }
}

TEST(MassMatrix, DgIsBlockDiagonal) {
  const auto mesh = unit_square(2);
  const auto W = build_space(mesh, 2, Continuity::DG);
  const SparseMatrix m = assemble_mass_W(*W);
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) EXPECT_EQ(it.row() / 6, it.col() / 6);
  }
}

TEST(HessianOperator, Shapes) {
  const auto V = build_space(unit_square(2), 2, Continuity::CG);
  for (Continuity mode : {Continuity::CG, Continuity::DG}) {
    const HessianOperator op(V, mode);
    for (int i = 0; i < 2; ++i) {
      for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(op.C(i, j).rows(), op.space_W()->num_dofs());
        EXPECT_EQ(op.C(i, j).cols(), V->num_dofs());
      }
    }
  }
}

class RecoveryTest : public ::testing::TestWithParam<Continuity> {};

TEST_P(RecoveryTest, ConstantHasZeroHessian) {
  const auto V = build_space(skewed_mesh(), 2, Continuity::CG);
  const HessianOperator op(V, GetParam());
  const Vector one = Vector::Ones(V->num_dofs());
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) EXPECT_LT((op.C(i, j) * one).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST_P(RecoveryTest, QuadraticsAreRecoveredExactly) {
  const auto V = build_space(skewed_mesh(), 2, Continuity::CG);
  const HessianOperator op(V, GetParam());
  const HessianFunctions hx = recover_hessian(op, interpolate(V, [](Point2 x) { return x.x * x.x; }));
  EXPECT_LT(max_deviation(hx[0][0], [](Point2) { return 2.0; }), 1e-11);
  EXPECT_LT(max_deviation(hx[0][1], [](Point2) { return 0.0; }), 1e-11);
  EXPECT_LT(max_deviation(hx[1][0], [](Point2) { return 0.0; }), 1e-11);
  EXPECT_LT(max_deviation(hx[1][1], [](Point2) { return 0.0; }), 1e-11);
  const HessianFunctions hxy = recover_hessian(op, interpolate(V, [](Point2 x) { return x.x * x.y; }));
  EXPECT_LT(max_deviation(hxy[0][1], [](Point2) { return 1.0; }), 1e-11);
  EXPECT_LT(max_deviation(hxy[1][0], [](Point2) { return 1.0; }), 1e-11);
  const FEFunction v = interpolate(V, [](Point2 x) { return x.x * x.x + x.y * x.y; });
  const HessianFunctions hr = recover_hessian(op, v);
  EXPECT_LT(max_deviation(hr[0][0], [](Point2) { return 2.0; }), 1e-11);
  EXPECT_LT(max_deviation(hr[1][1], [](Point2) { return 2.0; }), 1e-11);
  EXPECT_LT(max_deviation(hr[0][1], [](Point2) { return 0.0; }), 1e-11);
  EXPECT_LT(max_deviation(fe_laplacian(op, v), [](Point2) { return 4.0; }), 1e-11);
}

TEST_P(RecoveryTest, ZeroLaplacianOfZero) {
  const auto V = build_space(unit_square(2), 3, Continuity::CG);
  const HessianOperator op(V, GetParam());
  EXPECT_EQ(fe_laplacian(op, FEFunction(V)).coefficients.cwiseAbs().maxCoeff(), 0.0);
}

TEST_P(RecoveryTest, TraceMatchesLaplacian) {
  std::mt19937 rng(7);
  const auto V = build_space(skewed_mesh(), 3, Continuity::CG);
  const HessianOperator op(V, GetParam());
  for (int trial = 0; trial < 5; ++trial) {
    const FEFunction v(V, random_vector(V->num_dofs(), rng));
    const HessianFunctions h = recover_hessian(op, v);
    const Vector trace = h[0][0].coefficients + h[1][1].coefficients;
    EXPECT_LT((trace - fe_laplacian(op, v).coefficients).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST_P(RecoveryTest, Linearity) {
  std::mt19937 rng(8);
  const auto V = build_space(unit_square(3), 2, Continuity::CG);
  const HessianOperator op(V, GetParam());
  const FEFunction u(V, random_vector(V->num_dofs(), rng));
  const FEFunction v(V, random_vector(V->num_dofs(), rng));
  const FEFunction w(V, 2.5 * u.coefficients - 0.75 * v.coefficients);
  const HessianFunctions hu = recover_hessian(op, u), hv = recover_hessian(op, v), hw = recover_hessian(op, w);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      const Vector combo = 2.5 * hu[i][j].coefficients - 0.75 * hv[i][j].coefficients;
      EXPECT_LT((hw[i][j].coefficients - combo).cwiseAbs().maxCoeff(), 1e-12 * (1 + combo.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_P(RecoveryTest, ProjectionOfPolynomialHessian) {
  // For a global polynomial of degree p the Hessian lies in W_h and recovery is its L2 projection.
  std::mt19937 rng(21);
  const auto mesh = skewed_mesh();
  for (int p = 2; p <= 4; ++p) {
    const auto V = build_space(mesh, p, Continuity::CG);
    const HessianOperator op(V, GetParam());
    const auto W = op.space_W();
    for (int trial = 0; trial < 3; ++trial) {
      const RandomPolynomial poly = random_polynomial(p, rng);
      const FEFunction u = interpolate(V, [&](Point2 x) { return poly.value(x); });
      const HessianFunctions h = recover_hessian(op, u);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Vector projection = l2_projection(*W, [&](Point2 x) { return poly.d2(x, i, j); }, 2 * p);
          const auto& got = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].coefficients;
          EXPECT_LT((got - projection).cwiseAbs().maxCoeff(), 1e-10) << "p=" << p << " i=" << i << " j=" << j;
        }
      }
    }
  }
}

TEST_P(RecoveryTest, RandomFunctionsMatchBruteForceOracle) {
  std::mt19937 rng(99);
  const auto mesh = unit_square(1);
  for (int p = 2; p <= 3; ++p) {
    const auto V = build_space(mesh, p, Continuity::CG);
    const HessianOperator op(V, GetParam());
    const DenseMatrix md = dense(assemble_mass_W(*op.space_W()));
    for (int trial = 0; trial < 4; ++trial) {
      const FEFunction u(V, random_vector(V->num_dofs(), rng));
      const HessianFunctions h = recover_hessian(op, u);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          const Vector expected = md.ldlt().solve(brute_force_rhs(*V, *op.space_W(), u.coefficients, i, j));
          const auto& got = h[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].coefficients;
          EXPECT_LT((got - expected).cwiseAbs().maxCoeff(), 1e-10);
        }
      }
    }
  }
}

TEST_P(RecoveryTest, ConvergenceForSmoothFunction) {
  auto u = [](Point2 x) { return std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); };
  auto uxx = [](Point2 x) { return -4 * kPi * kPi * std::sin(2 * kPi * x.x) * std::sin(2 * kPi * x.y); };
  std::vector<double> errs, norms;
  for (int n : {8, 16, 32, 64}) {
    const auto V = build_space(unit_square(n), 2, Continuity::CG);
    const HessianOperator op(V, GetParam());
    const HessianFunctions h = recover_hessian(op, interpolate(V, u));
    errs.push_back(l2_deviation(h[0][0], uxx));
    norms.push_back(l2_deviation(h[0][0], [](Point2) { return 0.0; }));
  }
  // Rate p - 1 = 1 between h = 1/8 and 1/16. The continuous recovery is faster on
  // structured meshes (about h^{3/2}), so only the lower bound applies to it.
  if (GetParam() == Continuity::DG) {
    EXPECT_NEAR(errs[0] / errs[1], 2.0, 0.4);
  } else {
    EXPECT_GE(errs[0] / errs[1], 2.0 - 0.4);
  }
  // Stability: the recovered norm converges to ||u_xx|| = 2 pi^2 without blowing up.
  for (double nrm : norms) EXPECT_LT(nrm, 1.2 * 2 * kPi * kPi);
  EXPECT_LT(std::abs(norms[3] - 2 * kPi * kPi), std::abs(norms[0] - 2 * kPi * kPi) + 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Modes, RecoveryTest, ::testing::Values(Continuity::CG, Continuity::DG),
                         [](const auto& info) { return info.param == Continuity::CG ? "CG" : "DG"; });

TEST(HessianOperator, RejectsForeignFunction) {
  const auto V = build_space(unit_square(1), 2, Continuity::CG);
  const auto V2 = build_space(unit_square(1), 2, Continuity::CG);
  const HessianOperator op(V, Continuity::CG);
  EXPECT_THROW(recover_hessian(op, FEFunction(V2)), ConfigError);
  EXPECT_THROW(fe_laplacian(op, FEFunction(V2)), ConfigError);
}

TEST(HessianOperator, CgAndDgAgreeForGlobalPolynomials) {
  const auto V = build_space(skewed_mesh(), 3, Continuity::CG);
  const FEFunction u = interpolate(V, [](Point2 x) { return x.x * x.x * x.y - 2 * x.y * x.y * x.y + x.x; });
  const HessianFunctions hc = recover_hessian(HessianOperator(V, Continuity::CG), u);
  const HessianFunctions hd = recover_hessian(HessianOperator(V, Continuity::DG), u);
  auto exact = [](Point2 x) { return SymMatrix2{2 * x.y, 2 * x.x, -12 * x.y}; };
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      auto f = [&](Point2 x) { return exact(x)(i, j); };
      EXPECT_LT(max_deviation(hc[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], f), 1e-10);
      EXPECT_LT(max_deviation(hd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], f), 1e-10);
    }
  }
}
