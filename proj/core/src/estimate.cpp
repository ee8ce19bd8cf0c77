#include "nondivfem/estimate.hpp"

#include "nondivfem/quadrature.hpp"

#include <cmath>

namespace nondivfem {
namespace {

void require_scalar_cg(const FEFunction& u_h) {
  if (!u_h.space || u_h.space->continuity() != Continuity::CG || u_h.space->value_shape() != ValueShape::Scalar) {
    throw ConfigError("estimate: u_h must live in a continuous scalar space");
  }
}

double hessian_frobenius_squared(const SymMatrix2& h) { return h.frobenius_squared(); }

// sum_q w_q |D^2 u(x_q) - D^2 u_h(x_q)|_F^2 on one cell.
double cell_hessian_error_squared(const PointwiseValues& pv, const ExactSolution& exact, const CellValues& cv) {
  double s = 0.0;
  for (std::size_t q = 0; q < pv.points.size(); ++q) {
    s += cv.jxw[q] * hessian_frobenius_squared(exact.hessian(pv.points[q]) - pv.hessians[q]);
  }
  return s;
}

}  // namespace

std::vector<double> cell_jump_terms(const FEFunction& u_h) {
  require_scalar_cg(u_h);
  const Mesh& mesh = u_h.space->mesh();
  const LineRule line = line_quadrature(2 * u_h.space->degree());
  std::vector<double> out(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  for (Index f = 0; f < mesh.num_facets(); ++f) {
    if (mesh.is_boundary_facet(f)) continue;
    const FacetGeometry g = facet_geometry(mesh, f);
    const FacetQuadrature fq = facet_quadrature(mesh, f, line);
    const PointwiseValues vm = evaluate_at(u_h, *g.minus_cell, fq.points);
    const PointwiseValues vp = evaluate_at(u_h, g.plus_cell, fq.points);
    double s = 0.0;
    for (std::size_t q = 0; q < fq.points.size(); ++q) {
      const double jump = dot(vp.gradients[q] - vm.gradients[q], g.normal);
      s += fq.weights[q] * jump * jump;
    }
    s /= g.length;
    out[static_cast<std::size_t>(*g.minus_cell)] += s;
    out[static_cast<std::size_t>(g.plus_cell)] += s;
  }
  return out;
}

ErrorNorms error_norms(const FEFunction& u_h, const ExactSolution& exact, int quad_degree) {
  require_scalar_cg(u_h);
  const Mesh& mesh = u_h.space->mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = u_h.space->element().tabulate(quad.points);
  double l2 = 0.0, h1 = 0.0, hess = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv = cell_values(tab, affine_map(mesh, c), quad);
    const PointwiseValues pv = evaluate(u_h, c, quad);
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point2 x = pv.points[q];
      const double e = exact.value(x) - pv.values[q];
      const Point2 ge = exact.gradient(x) - pv.gradients[q];
      l2 += cv.jxw[q] * e * e;
      h1 += cv.jxw[q] * dot(ge, ge);
    }
    hess += cell_hessian_error_squared(pv, exact, cv);
  }
  double jumps = 0.0;
  for (double j : cell_jump_terms(u_h)) jumps += j;
  jumps *= 0.5;  // cell_jump_terms counts each facet twice
  ErrorNorms n;
  n.l2 = std::sqrt(l2);
  n.h1 = std::sqrt(l2 + h1);
  n.hessian_broken = std::sqrt(hess);
  n.h2h = std::sqrt(hess + jumps);
  return n;
}

std::vector<double> local_h2h_errors(const FEFunction& u_h, const ExactSolution& exact, int quad_degree) {
  require_scalar_cg(u_h);
  const Mesh& mesh = u_h.space->mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = u_h.space->element().tabulate(quad.points);
  std::vector<double> out = cell_jump_terms(u_h);
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv = cell_values(tab, affine_map(mesh, c), quad);
    const PointwiseValues pv = evaluate(u_h, c, quad);
    auto& v = out[static_cast<std::size_t>(c)];
    v = std::sqrt(v + cell_hessian_error_squared(pv, exact, cv));
  }
  return out;
}

EstimatorField local_estimator(const FEFunction& u_h, const ProblemData& problem, int quad_degree) {
  require_scalar_cg(u_h);
  const Mesh& mesh = u_h.space->mesh();
  const QuadratureRule quad = quadrature(quad_degree);
  const Tabulation tab = u_h.space->element().tabulate(quad.points);
  EstimatorField est;
  est.local = cell_jump_terms(u_h);
  double total = 0.0;
  for (Index c = 0; c < mesh.num_cells(); ++c) {
    const CellValues cv = cell_values(tab, affine_map(mesh, c), quad);
    const PointwiseValues pv = evaluate(u_h, c, quad);
    double s = 0.0;
    for (std::size_t q = 0; q < quad.size(); ++q) {
      const Point2 x = pv.points[q];
      const SymMatrix2 a = problem.coefficient(x);
      const double r = normalization(a) * (problem.forcing(x) - a.contract(pv.hessians[q]));
      s += cv.jxw[q] * r * r;
    }
    auto& v = est.local[static_cast<std::size_t>(c)];
    v += s;
    total += v;
    v = std::sqrt(v);
  }
  est.global = std::sqrt(total);
  return est;
}

std::vector<double> eoc(std::span<const double> h, std::span<const double> errors) {
  if (h.size() != errors.size() || h.size() < 2) throw ConfigError("eoc: need at least two (h, error) pairs");
  std::vector<double> rates;
  for (std::size_t k = 0; k + 1 < h.size(); ++k) {
    if (!(h[k] > 0.0) || !(h[k + 1] > 0.0) || !(errors[k] > 0.0) || !(errors[k + 1] > 0.0)) {
      throw ConfigError("eoc: inputs must be positive");
    }
    rates.push_back(std::log(errors[k] / errors[k + 1]) / std::log(h[k] / h[k + 1]));
  }
  return rates;
}

std::vector<double> eoc_dofs(std::span<const double> dofs, std::span<const double> errors) {
  std::vector<double> rates = eoc(dofs, errors);
  for (double& r : rates) r *= -2.0;
  return rates;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("loglog_slope: need at least two points");
  double mx = 0.0, my = 0.0;
  const auto n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw ConfigError("loglog_slope: inputs must be positive");
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ConfigError("loglog_slope: x values must not all coincide");
  return sxy / sxx;
}

}  // namespace nondivfem
