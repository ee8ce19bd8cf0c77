#include "nondivfem/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace nondivfem {

std::vector<Index> doerfler_mark(std::span<const double> eta, double theta, MarkingConvention convention) {
  if (eta.empty()) throw ConfigError("doerfler_mark: empty estimator field");
  if (!(theta > 0.0) || theta > 1.0) throw ConfigError("doerfler_mark: theta must lie in (0, 1]");
  std::vector<Index> order(eta.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return eta[static_cast<std::size_t>(a)] > eta[static_cast<std::size_t>(b)];
  });
  const bool squared = convention == MarkingConvention::Squared;
  auto weight = [&](Index c) {
    const double e = eta[static_cast<std::size_t>(c)];
    return squared ? e * e : e;
  };
  double total = 0.0;
  for (Index c : order) total += weight(c);
  const double target = (squared ? theta * theta : theta) * total;
  // Relative slack so that exact decimal targets such as 0.81 of a sum are met.
  const double slack = 1e-12 * total;
  std::vector<Index> marked;
  double acc = 0.0;
  for (Index c : order) {
    if (acc >= target - slack) break;
    if (weight(c) <= 0.0) break;
    marked.push_back(c);
    acc += weight(c);
  }
  return marked;
}

Index cg_dof_count(const Mesh& mesh, int degree) {
  const Index interior_per_cell = (degree - 1) * (degree - 2) / 2;
  return mesh.num_vertices() + (degree - 1) * mesh.num_facets() + interior_per_cell * mesh.num_cells();
}

AdaptiveRecord evaluate_level(const ProblemData& problem, const Solution& solution, int level,
                              const EstimatorField& estimator) {
  const Mesh& mesh = solution.u_h.space->mesh();
  AdaptiveRecord rec;
  rec.level = level;
  rec.n_dofs = solution.u_h.space->num_scalar_dofs();
  rec.n_cells = mesh.num_cells();
  rec.h_max = mesh_quality(mesh).h_max;
  rec.gmres_iterations = solution.report.iterations;
  rec.converged = solution.report.converged;
  const int qd = solution.quad_degree;
  if (problem.exact) rec.errors = error_norms(solution.u_h, *problem.exact, qd);
  rec.eta_global = estimator.global;
  return rec;
}

AdaptiveResult adaptive_loop(const ProblemData& problem, std::shared_ptr<const Mesh> initial,
                             const AdaptiveOptions& options) {
  AdaptiveResult result;
  std::shared_ptr<const Mesh> mesh = std::move(initial);
  for (int level = 0; level < options.max_levels; ++level) {
    if (cg_dof_count(*mesh, options.solve.degree) > options.max_dofs) break;
    result.final_mesh = mesh;
    Solution sol;
    try {
      sol = solve_problem(problem, mesh, options.solve);
    } catch (const CordesViolated&) {
      throw;
    } catch (const std::exception& e) {
      result.failure = std::string("level ") + std::to_string(level) + ": " + e.what();
      break;
    }
    const EstimatorField est = local_estimator(sol.u_h, problem, sol.quad_degree);
    result.records.push_back(evaluate_level(problem, sol, level, est));
    if (options.observer) options.observer(sol, est);
    if (!sol.report.converged) {
      result.failure = "level " + std::to_string(level) + ": GMRES did not converge";
      break;
    }
    const std::vector<Index> marked = doerfler_mark(est.local, options.theta, options.convention);
    if (marked.empty()) break;
    mesh = std::make_shared<const Mesh>(bisect(*mesh, marked));
  }
  return result;
}

AdaptiveResult uniform_study(const ProblemData& problem, std::span<const int> subdivisions,
                             const SolveOptions& options, const LevelObserver& observer) {
  AdaptiveResult result;
  int level = 0;
  for (int n : subdivisions) {
    const Rect& d = problem.domain;
    auto mesh = std::make_shared<const Mesh>(build_rect_mesh(d.x0, d.x1, d.y0, d.y1, n, n));
    result.final_mesh = mesh;
    Solution sol;
    try {
      sol = solve_problem(problem, mesh, options);
    } catch (const CordesViolated&) {
      throw;
    } catch (const std::exception& e) {
      result.failure = std::string("level ") + std::to_string(level) + ": " + e.what();
      break;
    }
    const EstimatorField est = local_estimator(sol.u_h, problem, sol.quad_degree);
    result.records.push_back(evaluate_level(problem, sol, level, est));
    if (observer) observer(sol, est);
    if (!sol.report.converged) {
      result.failure = "level " + std::to_string(level) + ": GMRES did not converge";
      break;
    }
    ++level;
  }
  return result;
}

}  // namespace nondivfem
