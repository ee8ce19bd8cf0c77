#include "nondivfem/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <map>

using namespace nondivfem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct CommonFlags {
  std::string scheme{"recovery-cg"};
  std::string refine{"uniform"};
  std::string marking{"squared"};
  std::optional<double> eta1, eta2;
  std::optional<int> quad;
};

void add_problem_flags(CLI::App* app, RunConfig& cfg) {
  app->add_option("--experiment", cfg.experiment, "exp1, exp2, exp3, exp4 or poly")->capture_default_str();
  app->add_option("--kappa", cfg.params.kappa, "off-diagonal entry of A for exp1")->capture_default_str();
  app->add_option("--alpha", cfg.params.alpha, "singularity exponent for exp2")->capture_default_str();
}

void add_solver_flags(CLI::App* app, RunConfig& cfg, CommonFlags& f) {
  app->add_option("--scheme", f.scheme, "recovery-cg, recovery-dg or nsz")->capture_default_str();
  app->add_option("--degree", cfg.degree, "polynomial degree p")->capture_default_str();
  app->add_option("--eta1", f.eta1, "gradient-jump penalty (default from the Cordes epsilon)");
  app->add_option("--eta2", f.eta2, "Hessian-jump penalty (default 0)");
  app->add_option("--tol-abs", cfg.gmres.tol_abs, "GMRES absolute tolerance")->capture_default_str();
  app->add_option("--tol-rel", cfg.gmres.tol_rel, "GMRES relative tolerance")->capture_default_str();
  app->add_option("--max-iter", cfg.gmres.max_iter, "GMRES iteration limit")->capture_default_str();
  app->add_option("--quad-degree", f.quad, "quadrature degree for A and f");
  app->add_option("--n0", cfg.initial_subdivisions, "cells per direction of the first mesh")->capture_default_str();
  app->add_option("--out", cfg.output, "CSV output path (stdout when omitted)");
}

void add_adaptive_flags(CLI::App* app, RunConfig& cfg, CommonFlags& f) {
  app->add_option("--theta", cfg.theta, "Doerfler bulk fraction")->capture_default_str();
  app->add_option("--marking", f.marking, "squared or linear Doerfler convention")->capture_default_str();
  app->add_option("--max-dofs", cfg.max_dofs, "stop before a mesh with more dofs")->capture_default_str();
}

void finish(RunConfig& cfg, const CommonFlags& f) {
  cfg.scheme = parse_scheme(f.scheme);
  cfg.eta1 = f.eta1;
  cfg.eta2 = f.eta2;
  cfg.quad_degree = f.quad;
  if (f.refine == "uniform") {
    cfg.refinement = Refinement::Uniform;
  } else if (f.refine == "adaptive") {
    cfg.refinement = Refinement::Adaptive;
  } else {
    throw ConfigError("--refine must be uniform or adaptive");
  }
  if (f.marking == "squared") {
    cfg.convention = MarkingConvention::Squared;
  } else if (f.marking == "linear") {
    cfg.convention = MarkingConvention::Linear;
  } else {
    throw ConfigError("--marking must be squared or linear");
  }
  cfg.validate();
}

void emit(const std::string& path, const CsvTable& table) {
  if (path.empty()) {
    write_csv(std::cout, table);
  } else {
    write_csv_file(path, table);
  }
}

int report_convergence(const RunConfig& cfg) {
  const ConvergenceRun run = run_convergence(cfg);
  emit(cfg.output, run.table);
  std::cerr << run.table.rows.size() << " level(s) written\n";
  if (run.result.failure) {
    std::cerr << "solver failure: " << *run.result.failure << '\n';
    return kExitSolver;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite element solver for A : D^2 u = f under the Cordes condition"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CommonFlags run_flags;
  CLI::App* run = app.add_subcommand("run", "convergence study on uniform or adaptive meshes");
  add_problem_flags(run, run_cfg);
  add_solver_flags(run, run_cfg, run_flags);
  add_adaptive_flags(run, run_cfg, run_flags);
  run->add_option("--refine", run_flags.refine, "uniform or adaptive")->capture_default_str();
  run->add_option("--levels", run_cfg.levels, "number of uniform meshes")->capture_default_str();

  RunConfig adapt_cfg;
  adapt_cfg.experiment = "exp2";
  CommonFlags adapt_flags;
  adapt_flags.refine = "adaptive";
  CLI::App* adapt = app.add_subcommand("adapt", "adaptive solve-estimate-mark-refine loop");
  add_problem_flags(adapt, adapt_cfg);
  add_solver_flags(adapt, adapt_cfg, adapt_flags);
  add_adaptive_flags(adapt, adapt_cfg, adapt_flags);

  std::vector<double> kappas{0.9, 0.99, 0.999};
  std::vector<double> eta1s{0.0, 1.0};
  std::vector<int> exponents{3, 4, 5, 6};
  GmresOptions iters_gmres;
  std::string iters_out;
  CLI::App* iters = app.add_subcommand("iters", "GMRES iteration table for exp1, p = 2");
  iters->add_option("--kappas", kappas, "kappa values")->delimiter(',')->capture_default_str();
  iters->add_option("--eta1", eta1s, "eta1 values")->delimiter(',')->capture_default_str();
  iters->add_option("--h-exponents", exponents, "meshes with h = 2^-k")->delimiter(',')->capture_default_str();
  iters->add_option("--tol-abs", iters_gmres.tol_abs, "GMRES absolute tolerance")->capture_default_str();
  iters->add_option("--tol-rel", iters_gmres.tol_rel, "GMRES relative tolerance")->capture_default_str();
  iters->add_option("--max-iter", iters_gmres.max_iter, "GMRES iteration limit")->capture_default_str();
  iters->add_option("--out", iters_out, "CSV output path (stdout when omitted)");

  RunConfig cmp_cfg;
  CommonFlags cmp_flags;
  std::vector<int> degrees{1, 2, 3, 4};
  CLI::App* compare = app.add_subcommand("compare", "recovery-cg, recovery-dg and nsz on the same meshes");
  add_problem_flags(compare, cmp_cfg);
  compare->add_option("--degrees", degrees, "polynomial degrees")->delimiter(',')->capture_default_str();
  compare->add_option("--levels", cmp_cfg.levels, "number of uniform meshes")->capture_default_str();
  compare->add_option("--n0", cmp_cfg.initial_subdivisions, "cells per direction of the first mesh")
      ->capture_default_str();
  compare->add_option("--eta1", cmp_flags.eta1, "gradient-jump penalty");
  compare->add_option("--eta2", cmp_flags.eta2, "Hessian-jump penalty");
  compare->add_option("--out", cmp_cfg.output, "CSV output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) {
      finish(run_cfg, run_flags);
      return report_convergence(run_cfg);
    }
    if (*adapt) {
      finish(adapt_cfg, adapt_flags);
      return report_convergence(adapt_cfg);
    }
    if (*iters) {
      std::vector<int> n;
      for (int k : exponents) {
        if (k < 0 || k > 12) throw ConfigError("--h-exponents must lie in [0, 12]");
        n.push_back(1 << k);
      }
      for (double k : kappas) {
        if (!(std::abs(k) < 1.0)) throw ConfigError("kappa values must satisfy |kappa| < 1");
      }
      for (double e : eta1s) {
        if (!(e >= 0.0)) throw ConfigError("eta1 values must be >= 0");
      }
      const CsvTable table = run_iteration_table(kappas, n, eta1s, iters_gmres);
      emit(iters_out, table);
      for (const auto& row : table.rows) {
        for (std::size_t c = 1; c < row.size(); ++c) {
          if (row[c] && *row[c] < 0) {
            std::cerr << "solver failure in column " << table.header[c] << '\n';
            return kExitSolver;
          }
        }
      }
      return 0;
    }
    if (*compare) {
      for (int p : degrees) {
        if (p < 1 || p > 8) throw ConfigError("--degrees must lie in [1, 8]");
      }
      finish(cmp_cfg, cmp_flags);
      emit(cmp_cfg.output, run_scheme_comparison(cmp_cfg, degrees));
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CordesViolated& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
