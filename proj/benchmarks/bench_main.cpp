#include <random>

#include <benchmark/benchmark.h>

#include "dphase/eigensolver.hpp"
#include "dphase/experiments.hpp"
#include "dphase/weights.hpp"

using namespace dphase;

namespace {

std::vector<double> random_samples(std::size_t n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> d;
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void BM_LuxemburgNorm(benchmark::State& state) {
  const auto mesh = Mesh::interval(0.0, 1.0, static_cast<int>(state.range(0)));
  const DoublePhase H(2.0, 3.0, WeightSpec::parse("ramp:0,2").on_cells(*mesh));
  const auto x = random_samples(mesh->num_cells());
  for (auto _ : state) benchmark::DoNotOptimize(luxemburg_norm(x, H).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LuxemburgNorm)->RangeMultiplier(8)->Range(64, 32768);

void BM_ClosedFormNorm(benchmark::State& state) {
  const auto mesh = Mesh::interval(0.0, 1.0, static_cast<int>(state.range(0)));
  const DoublePhase H(2.0, 3.0, WeightSpec::parse("ramp:0,2").on_cells(*mesh));
  const auto x = random_samples(mesh->num_cells());
  for (auto _ : state) benchmark::DoNotOptimize(closed_form_norm(x, H).value);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClosedFormNorm)->RangeMultiplier(8)->Range(64, 32768);

void BM_FirstEigenpair1D(benchmark::State& state) {
  const auto mesh = Mesh::interval(0.0, 1.0, static_cast<int>(state.range(0)));
  const DoublePhase H(2.0, 2.4, WeightField::constant(mesh->num_cells(), 1.0, mesh->cell_measure()));
  SolverOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(first_eigenpair(mesh, H, opts).lambda);
}
BENCHMARK(BM_FirstEigenpair1D)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_FirstEigenpair2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto mesh = Mesh::rectangle({0, 0}, {1, 1}, n, n);
  const DoublePhase H(2.0, 2.4, WeightField::constant(mesh->num_cells(), 1.0, mesh->cell_measure()));
  SolverOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(first_eigenpair(mesh, H, opts).lambda);
}
BENCHMARK(BM_FirstEigenpair2D)->Arg(32)->Arg(96)->Unit(benchmark::kMillisecond);

void BM_MinimaxTable(benchmark::State& state) {
  const auto mesh = Mesh::interval(0.0, 1.0, 256);
  const DoublePhase H(2.0, 2.4, WeightField::constant(mesh->num_cells(), 1.0, mesh->cell_measure()));
  SolverOptions opts;
  for (auto _ : state) benchmark::DoNotOptimize(minimax_table(mesh, H, static_cast<int>(state.range(0)), opts));
}
BENCHMARK(BM_MinimaxTable)->Arg(2)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
