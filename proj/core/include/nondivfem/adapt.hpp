#pragma once

#include "nondivfem/estimate.hpp"
#include "nondivfem/solve.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace nondivfem {

enum class MarkingConvention {
  /// sum_M eta_T^2 >= theta^2 eta^2.
  Squared,
  /// sum_M eta_T >= theta sum_T eta_T.
  Linear,
};

/// Smallest prefix of the cells sorted by eta_T (descending, ties by cell id)
/// that meets the Doerfler criterion. Returned ids are in sort order.
std::vector<Index> doerfler_mark(std::span<const double> eta, double theta,
                                 MarkingConvention convention = MarkingConvention::Squared);

struct AdaptiveRecord {
  int level{0};
  Index n_dofs{0};
  Index n_cells{0};
  double h_max{0.0};
  std::optional<ErrorNorms> errors;
  double eta_global{0.0};
  int gmres_iterations{0};
  bool converged{true};
};

/// Called once per solved level with the solution and its estimator.
using LevelObserver = std::function<void(const Solution&, const EstimatorField&)>;

struct AdaptiveOptions {
  SolveOptions solve;
  double theta{0.9};
  MarkingConvention convention{MarkingConvention::Squared};
  /// No level whose dim(V_h) exceeds this is solved.
  Index max_dofs{100000};
  int max_levels{100};
  LevelObserver observer;
};

struct AdaptiveResult {
  std::vector<AdaptiveRecord> records;
  std::shared_ptr<const Mesh> final_mesh;
  /// Set when a level failed (solver error or non-convergence); records hold the levels before it.
  std::optional<std::string> failure;
};

/// dim(V_h) of the continuous degree-p space on a mesh.
Index cg_dof_count(const Mesh& mesh, int degree);

/// Record of one solved level. Errors are computed when the problem has an exact solution.
AdaptiveRecord evaluate_level(const ProblemData& problem, const Solution& solution, int level,
                              const EstimatorField& estimator);

/// Solve, estimate, mark, bisect until the next mesh would exceed max_dofs.
AdaptiveResult adaptive_loop(const ProblemData& problem, std::shared_ptr<const Mesh> initial,
                             const AdaptiveOptions& options);

/// One level per structured mesh with the given subdivision counts per direction.
AdaptiveResult uniform_study(const ProblemData& problem, std::span<const int> subdivisions,
                             const SolveOptions& options, const LevelObserver& observer = {});

}  // namespace nondivfem
