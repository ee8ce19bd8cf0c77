#include "nondivfem/estimate.hpp"
#include "nondivfem/solve.hpp"

#include "dense_oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace nondivfem;
using nondivfem::testing::unit_square;

TEST(ErrorNorms, InterpolantOfSpaceMemberIsExact) {
  const ProblemData p = make_poisson_polynomial();
  const auto V = build_space(unit_square(3), 4, Continuity::CG);
  const ErrorNorms e = error_norms(interpolate(V, p.exact->value), *p.exact, 10);
  EXPECT_LT(e.l2, 1e-10);
  EXPECT_LT(e.h1, 1e-10);
  EXPECT_LT(e.h2h, 1e-10);
}

TEST(ErrorNorms, ZeroApproximationOfSineProduct) {
  const ProblemData p = make_exp1(0.5);
  const auto V = build_space(unit_square(8), 2, Continuity::CG);
  const ErrorNorms e = error_norms(FEFunction(V), *p.exact, 10);
  EXPECT_NEAR(e.l2, 0.5, 1e-8);
  // |grad u|^2 integrates to 2 * (2 pi)^2 / 4, the Hessian seminorm squared to 4 (2 pi)^4 / 4.
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(e.h1, std::sqrt(0.25 + 2 * pi * pi), 1e-7);
  EXPECT_NEAR(e.h2h, 4 * pi * pi, 1e-5);
  EXPECT_EQ(e.h2h, e.hessian_broken);
}

TEST(ErrorNorms, JumpTermsVanishForGlobalPolynomials) {
  const auto V = build_space(std::make_shared<const Mesh>(bisect_uniform(build_rect_mesh(0, 1, 0, 1, 2, 2), 1)), 3,
                             Continuity::CG);
  const FEFunction u = interpolate(V, [](Point2 x) { return x.x * x.x * x.y + x.y; });
  for (double j : cell_jump_terms(u)) EXPECT_LT(j, 1e-20);
}

TEST(ErrorNorms, H2hDominatesBrokenSeminorm) {
  const ProblemData p = make_exp1(0.5);
  const auto mesh = unit_square(8);
  const Solution sol = solve_problem(p, mesh, {});
  const ErrorNorms e = error_norms(sol.u_h, *p.exact, 6);
  EXPECT_GT(e.h2h, e.hessian_broken);
  const std::vector<double> local = local_h2h_errors(sol.u_h, *p.exact, 6);
  // Local errors count every facet twice.
  const double total = std::accumulate(local.begin(), local.end(), 0.0, [](double s, double v) { return s + v * v; });
  double jumps = 0.0;
  for (double j : cell_jump_terms(sol.u_h)) jumps += j;
  EXPECT_NEAR(total, e.hessian_broken * e.hessian_broken + jumps, 1e-10 * total);
}

TEST(Estimator, ConstantResidual) {
  ProblemData p;
  p.coefficient = [](Point2) { return SymMatrix2{1, 0, 1}; };
  p.forcing = [](Point2) { return 1.0; };
  const auto mesh = unit_square(3);
  const auto V = build_space(mesh, 2, Continuity::CG);
  const EstimatorField est = local_estimator(FEFunction(V), p, 4);
  for (Index c = 0; c < mesh->num_cells(); ++c) {
    EXPECT_NEAR(est.local[static_cast<std::size_t>(c)] * est.local[static_cast<std::size_t>(c)], mesh->cell_area(c), 1e-14);
  }
  EXPECT_NEAR(est.global, 1.0, 1e-13);
}

TEST(Estimator, VanishesForReproducedPolynomial) {
  const ProblemData p = make_poisson_polynomial();
  SolveOptions opt;
  opt.degree = 4;
  opt.gmres.tol_abs = opt.gmres.tol_rel = 1e-12;
  const Solution sol = solve_problem(p, unit_square(2), opt);
  EXPECT_LT(local_estimator(sol.u_h, p, 10).global, 1e-8);
}

TEST(Estimator, GlobalIsSumOfSquares) {
  const ProblemData p = make_exp1(0.5);
  const Solution sol = solve_problem(p, unit_square(8), {});
  const EstimatorField est = local_estimator(sol.u_h, p, 6);
  double s = 0.0;
  for (double v : est.local) s += v * v;
  EXPECT_NEAR(est.global * est.global, s, 1e-12 * s);
}

TEST(Estimator, EfficiencyBoundAndRate) {
  const ProblemData p = make_exp1(0.5);
  std::vector<double> h, eta, err;
  for (int n : {8, 16, 32}) {
    const Solution sol = solve_problem(p, unit_square(n), {});
    const EstimatorField est = local_estimator(sol.u_h, p, 6);
    const std::vector<double> local = local_h2h_errors(sol.u_h, *p.exact, 6);
    for (std::size_t c = 0; c < local.size(); ++c) EXPECT_LE(est.local[c], 2 * local[c] + 1e-8);
    h.push_back(1.0 / n);
    eta.push_back(est.global);
    err.push_back(error_norms(sol.u_h, *p.exact, 6).h2h);
  }
  for (double r : eoc(h, eta)) EXPECT_NEAR(r, 1.0, 0.2);
  // Reliability witness: the ratio error / eta stays bounded.
  for (std::size_t k = 0; k < err.size(); ++k) EXPECT_LT(err[k] / eta[k], 3.0);
}

TEST(Eoc, Examples) {
  const std::vector<double> h{1, 0.5};
  EXPECT_NEAR(eoc(h, std::vector<double>{1, 0.25})[0], 2.0, 1e-15);
  EXPECT_NEAR(eoc(h, std::vector<double>{1, 0.125})[0], 3.0, 1e-15);
  EXPECT_NEAR(eoc(h, std::vector<double>{0.3, 0.3})[0], 0.0, 1e-15);
  EXPECT_THROW(eoc(h, std::vector<double>{1, 0}), ConfigError);
  EXPECT_THROW(eoc(std::vector<double>{1}, std::vector<double>{1}), ConfigError);
  // Quadrupling dofs in 2D halves h.
  EXPECT_NEAR(eoc_dofs(std::vector<double>{100, 400}, std::vector<double>{1, 0.25})[0], 2.0, 1e-14);
}

TEST(Eoc, LogLogSlope) {
  const std::vector<double> x{10, 100, 1000, 10000};
  std::vector<double> y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -0.5));
  EXPECT_NEAR(loglog_slope(x, y), -0.5, 1e-13);
  EXPECT_THROW(loglog_slope(std::vector<double>{1, 1}, std::vector<double>{1, 2}), ConfigError);
}
