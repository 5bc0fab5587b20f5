// Serial reference path against the OpenMP path for the three parallel kernels.
// Arg 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "mbep/dynamics.hpp"
#include "mbep/model.hpp"
#include "mbep/perturb.hpp"
#include "mbep/qgt.hpp"

using namespace mbep;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) ? Execution::parallel : Execution::serial; }

void BM_MetricScan(benchmark::State& state) {
  PresetParams params = default_params(Preset::qutrit_ii);
  params.gamma_h = 0.8;
  params.gamma_e = 0.2;
  params.gamma_cap = 0.3;
  const MatrixFamily family = lindbladian_eff_family(preset_drive_family(Preset::qutrit_ii, params));
  std::vector<double> grid;
  for (int k = 0; k < 400; ++k) grid.push_back(0.0005 + 1e-3 * k);
  ScanOptions so;
  so.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(metric_scan(family, grid, so));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.size()));
}

void BM_Evolve(benchmark::State& state) {
  PresetParams params = default_params(Preset::qutrit_ii);
  params.gamma_cap = 0.3;
  const ComplexMatrix l = build_parts(preset(Preset::qutrit_ii, params)).full_lindbladian;
  const auto times = linear_grid(0.0, 40.0, 400);
  EvolveOptions eo;
  eo.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(l, pure_state(4, 4), times, eo));
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(times.size()));
}

void BM_SplittingFit(benchmark::State& state) {
  const MatrixFamily family =
      lindbladian_eff_family(preset_rate_family(Preset::qutrit_i, default_params(Preset::qutrit_i)));
  const auto grid = log_grid(1e-8, 1e-4, 12);
  SplittingOptions so;
  so.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(splitting_exponent_fit(family, grid, so));
}

}  // namespace

BENCHMARK(BM_MetricScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Evolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SplittingFit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
