#include "nondivfem/solve.hpp"

#include <benchmark/benchmark.h>

using namespace nondivfem;

namespace {

std::shared_ptr<const Mesh> unit_mesh(int n) {
  return std::make_shared<const Mesh>(build_rect_mesh(0, 1, 0, 1, n, n));
}

void BM_HessianAssembly(benchmark::State& state) {
  const auto V = build_space(unit_mesh(static_cast<int>(state.range(0))), 2, Continuity::CG);
  for (auto _ : state) {
    HessianOperator op(V, Continuity::CG);
    benchmark::DoNotOptimize(op.laplace_matrix().nonZeros());
  }
  state.SetLabel(std::to_string(V->num_dofs()) + " dofs");
}
BENCHMARK(BM_HessianAssembly)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_ApplySystem(benchmark::State& state) {
  const auto V = build_space(unit_mesh(static_cast<int>(state.range(0))), 2, Continuity::CG);
  auto hess = std::make_shared<const HessianOperator>(V, Continuity::CG);
  const ProblemData problem = make_exp1(0.5);
  const SystemOperator op(hess, problem, {1.0, 0.0}, 6);
  const Vector u = Vector::Ones(op.num_interior());
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(u));
}
BENCHMARK(BM_ApplySystem)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_SolveExp1(benchmark::State& state) {
  const auto mesh = unit_mesh(static_cast<int>(state.range(0)));
  const ProblemData problem = make_exp1(0.9);
  SolveOptions opt;
  opt.eta1 = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_problem(problem, mesh, opt).report.iterations);
}
BENCHMARK(BM_SolveExp1)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Bisect(benchmark::State& state) {
  const Mesh mesh = build_rect_mesh(0, 1, 0, 1, 32, 32);
  std::vector<Index> marked;
  for (Index c = 0; c < mesh.num_cells(); c += 7) marked.push_back(c);
  for (auto _ : state) benchmark::DoNotOptimize(bisect(mesh, marked).num_cells());
}
BENCHMARK(BM_Bisect)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
