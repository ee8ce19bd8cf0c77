#pragma once

#include "nondivfem/adapt.hpp"
#include "nondivfem/csv.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace nondivfem {

enum class Refinement { Uniform, Adaptive };

struct RunConfig {
  std::string experiment{"exp1"};
  ProblemParameters params;
  Scheme scheme{Scheme::RecoveryCG};
  int degree{2};
  std::optional<double> eta1;
  std::optional<double> eta2;
  Refinement refinement{Refinement::Uniform};
  double theta{0.9};
  MarkingConvention convention{MarkingConvention::Squared};
  /// Uniform: number of meshes, subdivisions doubling from initial_subdivisions.
  int levels{5};
  /// Cells per direction of the first structured mesh.
  int initial_subdivisions{4};
  Index max_dofs{100000};
  GmresOptions gmres;
  std::optional<int> quad_degree;
  std::string output;

  /// Throws ConfigError on unknown keys or out-of-range values.
  void validate() const;
  SolveOptions solve_options() const;
};

/// Header: Ndofs,h_max,L2_error,H1_error,H2h_error,Eta_global,iterations.
CsvTable convergence_table(const std::vector<AdaptiveRecord>& records);

struct ConvergenceRun {
  AdaptiveResult result;
  CsvTable table;
};

ConvergenceRun run_convergence(const RunConfig& config);

/// GMRES iteration counts for the exp1 family: one row per mesh (first column h),
/// one column per (kappa, eta1) pair. Failed runs are recorded as -1.
CsvTable run_iteration_table(const std::vector<double>& kappas, const std::vector<int>& subdivisions,
                             const std::vector<double>& eta1_values, const GmresOptions& gmres = {});

/// Errors of recovery-cg, recovery-dg and nsz side by side on the same uniform
/// meshes, for each degree. nsz columns are empty for degree 1.
CsvTable run_scheme_comparison(const RunConfig& config, const std::vector<int>& degrees);

/// NONDIVFEM_THREADS if set and positive, otherwise the hardware concurrency.
int thread_cap();
/// Runs task(0..count-1) on up to thread_cap() threads.
void parallel_for(int count, const std::function<void(int)>& task);

}  // namespace nondivfem
