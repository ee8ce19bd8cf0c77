#include "nondivfem/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace nondivfem {
namespace {

std::vector<int> uniform_subdivisions(const RunConfig& c) {
  std::vector<int> n;
  for (int l = 0, s = c.initial_subdivisions; l < c.levels; ++l, s *= 2) n.push_back(s);
  return n;
}

std::string column_label(double kappa, double eta1) {
  return "kappa_" + format_number(kappa) + "_eta1_" + format_number(eta1);
}

}  // namespace

void RunConfig::validate() const {
  if (!is_known_problem(experiment)) throw ConfigError("unknown experiment key '" + experiment + "'");
  if (degree < 1 || degree > 8) throw ConfigError("degree must lie in [1, 8]");
  if (scheme == Scheme::NSZ && degree < 2) throw ConfigError("the nsz scheme needs degree >= 2");
  if (eta1 && *eta1 < 0.0) throw ConfigError("eta1 must be >= 0");
  if (eta2 && *eta2 < 0.0) throw ConfigError("eta2 must be >= 0");
  if (scheme == Scheme::NSZ && eta1 && !(*eta1 > 0.0)) throw ConfigError("the nsz scheme needs eta1 > 0");
  if (!(theta > 0.0) || theta > 1.0) throw ConfigError("theta must lie in (0, 1]");
  if (levels < 1) throw ConfigError("levels must be >= 1");
  if (initial_subdivisions < 1) throw ConfigError("initial subdivisions must be >= 1");
  if (max_dofs < 1) throw ConfigError("max-dofs must be >= 1");
  if (!(gmres.tol_abs >= 0.0) || !(gmres.tol_rel >= 0.0)) throw ConfigError("tolerances must be >= 0");
  if (gmres.max_iter < 1) throw ConfigError("max-iter must be >= 1");
  if (quad_degree && (*quad_degree < 1 || *quad_degree > 40)) throw ConfigError("quadrature degree must lie in [1, 40]");
  if (experiment == "exp1" && !(std::abs(params.kappa) < 1.0)) throw ConfigError("kappa must satisfy |kappa| < 1");
  if (experiment == "exp2" && !(params.alpha > 1.0)) throw ConfigError("alpha must be > 1");
}

SolveOptions RunConfig::solve_options() const {
  SolveOptions o;
  o.degree = degree;
  o.scheme = scheme;
  o.eta1 = eta1;
  o.eta2 = eta2;
  o.gmres = gmres;
  o.quad_degree = quad_degree;
  return o;
}

CsvTable convergence_table(const std::vector<AdaptiveRecord>& records) {
  CsvTable t;
  t.header = {"Ndofs", "h_max", "L2_error", "H1_error", "H2h_error", "Eta_global", "iterations"};
  for (const AdaptiveRecord& r : records) {
    std::vector<std::optional<double>> row{static_cast<double>(r.n_dofs), r.h_max};
    if (r.errors) {
      row.insert(row.end(), {r.errors->l2, r.errors->h1, r.errors->h2h});
    } else {
      row.insert(row.end(), {std::nullopt, std::nullopt, std::nullopt});
    }
    row.emplace_back(r.eta_global);
    row.emplace_back(static_cast<double>(r.gmres_iterations));
    t.rows.push_back(std::move(row));
  }
  return t;
}

ConvergenceRun run_convergence(const RunConfig& config) {
  config.validate();
  const ProblemData problem = make_problem(config.experiment, config.params);
  ConvergenceRun run;
  if (config.refinement == Refinement::Uniform) {
    const std::vector<int> n = uniform_subdivisions(config);
    run.result = uniform_study(problem, n, config.solve_options());
  } else {
    AdaptiveOptions opt;
    opt.solve = config.solve_options();
    opt.theta = config.theta;
    opt.convention = config.convention;
    opt.max_dofs = config.max_dofs;
    const Rect& d = problem.domain;
    auto mesh = std::make_shared<const Mesh>(
        build_rect_mesh(d.x0, d.x1, d.y0, d.y1, config.initial_subdivisions, config.initial_subdivisions));
    run.result = adaptive_loop(problem, mesh, opt);
  }
  run.table = convergence_table(run.result.records);
  return run;
}

CsvTable run_iteration_table(const std::vector<double>& kappas, const std::vector<int>& subdivisions,
                             const std::vector<double>& eta1_values, const GmresOptions& gmres) {
  CsvTable t;
  t.header.emplace_back("h");
  for (double k : kappas) {
    for (double e : eta1_values) t.header.push_back(column_label(k, e));
  }
  const int ncol = static_cast<int>(kappas.size() * eta1_values.size());
  const int nrow = static_cast<int>(subdivisions.size());
  std::vector<double> counts(static_cast<std::size_t>(ncol * nrow), -1.0);
  parallel_for(ncol * nrow, [&](int task) {
    const int row = task / ncol, col = task % ncol;
    const double kappa = kappas[static_cast<std::size_t>(col) / eta1_values.size()];
    const double eta1 = eta1_values[static_cast<std::size_t>(col) % eta1_values.size()];
    const int n = subdivisions[static_cast<std::size_t>(row)];
    try {
      const ProblemData problem = make_exp1(kappa);
      auto mesh = std::make_shared<const Mesh>(build_rect_mesh(0, 1, 0, 1, n, n));
      SolveOptions o;
      o.degree = 2;
      o.eta1 = eta1;
      o.eta2 = 0.0;
      o.gmres = gmres;
      const Solution sol = solve_problem(problem, mesh, o);
      if (sol.report.converged) counts[static_cast<std::size_t>(task)] = sol.report.iterations;
    } catch (const std::exception&) {
      // recorded as -1
    }
  });
  for (int r = 0; r < nrow; ++r) {
    std::vector<std::optional<double>> row{1.0 / subdivisions[static_cast<std::size_t>(r)]};
    for (int c = 0; c < ncol; ++c) row.emplace_back(counts[static_cast<std::size_t>(r * ncol + c)]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable run_scheme_comparison(const RunConfig& config, const std::vector<int>& degrees) {
  config.validate();
  const ProblemData problem = make_problem(config.experiment, config.params);
  if (!problem.exact) throw ConfigError("scheme comparison needs an experiment with an exact solution");
  const std::vector<Scheme> schemes{Scheme::RecoveryCG, Scheme::RecoveryDG, Scheme::NSZ};
  CsvTable t;
  t.header = {"degree", "Ndofs", "h_max"};
  for (Scheme s : schemes) {
    for (const char* norm : {"L2", "H1", "H2h"}) t.header.push_back(to_string(s) + "_" + norm);
  }
  const std::vector<int> n = uniform_subdivisions(config);
  const int per_degree = static_cast<int>(n.size() * schemes.size());
  std::vector<std::optional<ErrorNorms>> errs(degrees.size() * static_cast<std::size_t>(per_degree));
  std::vector<Index> dofs(degrees.size() * n.size(), 0);
  std::vector<double> hmax(degrees.size() * n.size(), 0.0);
  parallel_for(static_cast<int>(errs.size()), [&](int task) {
    const auto di = static_cast<std::size_t>(task / per_degree);
    const auto li = static_cast<std::size_t>((task % per_degree) / static_cast<int>(schemes.size()));
    const Scheme scheme = schemes[static_cast<std::size_t>(task) % schemes.size()];
    const int p = degrees[di];
    const Rect& d = problem.domain;
    auto mesh = std::make_shared<const Mesh>(build_rect_mesh(d.x0, d.x1, d.y0, d.y1, n[li], n[li]));
    if (scheme == Scheme::RecoveryCG) {
      dofs[di * n.size() + li] = cg_dof_count(*mesh, p);
      hmax[di * n.size() + li] = mesh_quality(*mesh).h_max;
    }
    if (scheme == Scheme::NSZ && p < 2) return;
    try {
      SolveOptions o = config.solve_options();
      o.degree = p;
      o.scheme = scheme;
      if (scheme == Scheme::NSZ && o.eta1 && !(*o.eta1 > 0.0)) o.eta1.reset();
      const Solution sol = solve_problem(problem, mesh, o);
      if (sol.report.converged) errs[static_cast<std::size_t>(task)] = error_norms(sol.u_h, *problem.exact, sol.quad_degree);
    } catch (const CordesViolated&) {
      throw;
    } catch (const std::exception&) {
      // left empty
    }
  });
  for (std::size_t di = 0; di < degrees.size(); ++di) {
    for (std::size_t li = 0; li < n.size(); ++li) {
      std::vector<std::optional<double>> row{static_cast<double>(degrees[di]),
                                             static_cast<double>(dofs[di * n.size() + li]), hmax[di * n.size() + li]};
      for (std::size_t si = 0; si < schemes.size(); ++si) {
        const auto& e = errs[di * static_cast<std::size_t>(per_degree) + li * schemes.size() + si];
        if (e) {
          row.insert(row.end(), {e->l2, e->h1, e->h2h});
        } else {
          row.insert(row.end(), {std::nullopt, std::nullopt, std::nullopt});
        }
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

int thread_cap() {
  if (const char* env = std::getenv("NONDIVFEM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(int count, const std::function<void(int)>& task) {
  const int nthreads = std::min(thread_cap(), count);
  if (nthreads <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          task(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace nondivfem
