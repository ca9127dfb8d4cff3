#include <benchmark/benchmark.h>

#include "fvcbfit/fvcbfit.hpp"

using namespace fvcb;

namespace {

Dataset make_dataset(int n_curves, std::size_t n_points) {
  Dataset ds;
  for (int i = 0; i < n_curves; ++i) {
    SynthSpec s;
    s.grid = linear_grid(50.0, 1800.0, n_points);
    s.noise_sd = 0.5;
    s.jitter = true;
    s.seed = 1000 + static_cast<std::uint64_t>(i);
    s.curve_id = i + 1;
    s.fitting_group = 1 + i % 2;
    ds.curves.push_back(generate_curve(s).curve);
  }
  rebuild_index(ds);
  return ds;
}

void BM_NetAssimilation(benchmark::State& state) {
  const GasExchangeRecord rec{1, 1, 400.0, 0.0, 1500.0, 28.0};
  ModelOptions opt;
  opt.light = LightResponse::kNonRectangular;
  opt.temp = TempResponse::kPeaked;
  const MainParams main;
  const GroupParams group;
  const FvCBConstants constants;
  for (auto _ : state) benchmark::DoNotOptimize(net_assimilation(rec, main, group, constants, opt));
}
BENCHMARK(BM_NetAssimilation);

void BM_TotalLoss(benchmark::State& state) {
  const Dataset ds = make_dataset(static_cast<int>(state.range(0)), 150);
  const FitConfig cfg;
  const auto st = init_parameters(ds, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(total_loss(ds, st, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.total_points()));
}
BENCHMARK(BM_TotalLoss)->Arg(1)->Arg(11);

// Gradient cost for each forward-mode width: main four only, with the
// temperature response, with light as well, and with gm and kinetics.
void BM_LossGradient(benchmark::State& state) {
  const Dataset ds = make_dataset(11, 180);
  FitConfig cfg;
  cfg.temp = state.range(0) >= 1 ? TempResponse::kPeaked : TempResponse::kNone;
  cfg.light = state.range(0) >= 2 ? LightResponse::kNonRectangular : LightResponse::kConstant;
  cfg.fit_gm = cfg.fit_kinetics = state.range(0) >= 3;
  const auto st = init_parameters(ds, cfg);
  const ParamLayout layout(ds, st, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(ds, st, cfg, layout));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(ds.total_points()));
}
BENCHMARK(BM_LossGradient)->DenseRange(0, 3);

void BM_LossGradientThreads(benchmark::State& state) {
  const Dataset ds = make_dataset(32, 180);
  FitConfig cfg;
  cfg.jobs = static_cast<int>(state.range(0));
  const auto st = init_parameters(ds, cfg);
  const ParamLayout layout(ds, st, cfg);
  for (auto _ : state) benchmark::DoNotOptimize(loss_gradient(ds, st, cfg, layout));
}
BENCHMARK(BM_LossGradientThreads)->Arg(1)->Arg(4)->UseRealTime();

void BM_Fit1000(benchmark::State& state) {
  const Dataset ds = make_dataset(11, 180);
  FitConfig cfg;
  cfg.adam.max_iter = 1000;
  for (auto _ : state) benchmark::DoNotOptimize(fit(ds, cfg));
}
BENCHMARK(BM_Fit1000)->Unit(benchmark::kMillisecond);

void BM_Preprocess(benchmark::State& state) {
  const Dataset ds = make_dataset(11, 180);
  for (auto _ : state) benchmark::DoNotOptimize(preprocess_dataset(ds, PreprocessConfig{}));
}
BENCHMARK(BM_Preprocess);

}  // namespace

BENCHMARK_MAIN();
