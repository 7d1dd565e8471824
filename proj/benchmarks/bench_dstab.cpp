// Assembly, solve and oracle timings on the shipped problems.

#include <string>

#include <benchmark/benchmark.h>

#include "dstab/analysis.hpp"
#include "dstab/oracle.hpp"
#include "dstab/problem_file.hpp"
#include "dstab/relax.hpp"
#include "dstab/sdp.hpp"

namespace {

using namespace dstab;

DStabilityProblem load(const std::string& name) {
  return load_problem(std::string(DSTAB_PROBLEMS_DIR) + "/" + name).problem;
}

void BM_MomentMatrixForm(benchmark::State& state) {
  const auto order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(moment_matrix_form(7, order));
}
BENCHMARK(BM_MomentMatrixForm)->Arg(1)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_AssembleRunning(benchmark::State& state) {
  const auto lifted = build_lifted(load("running_example.txt"));
  const auto tau = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_relaxation(lifted, tau));
}
BENCHMARK(BM_AssembleRunning)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_SolveRunning(benchmark::State& state) {
  const auto lifted = build_lifted(load("running_example.txt"));
  const auto sdp = assemble_relaxation(lifted, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve(sdp));
  state.counters["moments"] = static_cast<double>(sdp.num_moments());
}
BENCHMARK(BM_SolveRunning)->DenseRange(2, 4)->Unit(benchmark::kMillisecond);

void BM_SolveHurwitz(benchmark::State& state) {
  const auto lifted = build_lifted(load("hurwitz.txt"));
  const auto sdp = assemble_relaxation(lifted, 2);
  for (auto _ : state) benchmark::DoNotOptimize(solve(sdp));
  state.counters["moments"] = static_cast<double>(sdp.num_moments());
}
BENCHMARK(BM_SolveHurwitz)->Unit(benchmark::kMillisecond);

void BM_GridOracle(benchmark::State& state) {
  const auto problem = load("hurwitz.txt");
  const auto points = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_violation_search(problem, points));
}
BENCHMARK(BM_GridOracle)->Arg(101)->Arg(1001)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
