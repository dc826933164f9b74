#include <benchmark/benchmark.h>

#include "ldf/combiners.hpp"
#include "ldf/core.hpp"
#include "ldf/simulation.hpp"
#include "ldf/tvpvar.hpp"

namespace {

using namespace ldf;

ForecastPanel make_panel(int K, int T) {
  DgpParams params = DgpParams::study_defaults(K, T);
  return simulate_panel(params, fixed_level_path(T), 42).panel;
}

void bm_ldf_run(benchmark::State& state, int threads) {
  const ForecastPanel panel = make_panel(static_cast<int>(state.range(0)), 500);
  LdfConfig config = LdfConfig::stack("ss", LdfConfig::default_grid(), 0.8);
  config.keep_layer_weights = false;
  const par::Exec exec{threads};
  for (auto _ : state) {
    LdfTrace trace = ldf_run(panel, config, exec);
    benchmark::DoNotOptimize(trace.scores.data());
  }
}

void bm_dma_run(benchmark::State& state, int threads) {
  const ForecastPanel panel = make_panel(static_cast<int>(state.range(0)), 500);
  const par::Exec exec{threads};
  for (auto _ : state) {
    LdfTrace trace = dma_run(panel, 0.95, 1e-20, exec);
    benchmark::DoNotOptimize(trace.scores.data());
  }
}

VarData make_var_data(int m, int T) {
  Rng rng(3);
  VarData data;
  data.endo.resize(T, m);
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < m; ++j) data.endo(t, j) = 0.01 * rng.normal();
  }
  data.exog_asset.emplace_back(Eigen::MatrixXd::Zero(T, m));
  for (int t = 0; t < T; ++t) {
    for (int j = 0; j < m; ++j) data.exog_asset[0](t, j) = rng.normal();
  }
  data.exog_common.resize(T, 0);
  return data;
}

void bm_universe(benchmark::State& state, int threads) {
  const int m = 3;
  const VarData data = make_var_data(m, 160);
  UniverseGrids grids = restricted_universe();
  grids.p = {2};
  const std::vector<TvpVarSpec> specs = enumerate_universe(grids, m, 1, 0);
  UniverseForecastOptions options;
  options.calibration = 24;
  const par::Exec exec{threads};
  for (auto _ : state) {
    ForecastPanel panel = universe_forecasts(data, specs, options, exec);
    benchmark::DoNotOptimize(panel.y.data());
  }
}

}  // namespace

BENCHMARK_CAPTURE(bm_ldf_run, serial, 1)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_ldf_run, openmp, 0)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_dma_run, serial, 1)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_dma_run, openmp, 0)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_universe, serial, 1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(bm_universe, openmp, 0)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
