#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "fvcbfit/fvcbfit.hpp"
#include "test_util.hpp"

using namespace fvcb;

namespace {

FitConfig short_config(int iters) {
  FitConfig cfg;
  cfg.adam.max_iter = iters;
  return cfg;
}

const CurveFit& by_id(const FitResult& r, int id) {
  return *std::find_if(r.curves.begin(), r.curves.end(), [&](const CurveFit& c) { return c.curve_id == id; });
}

}  // namespace

TEST(AdamStep, FirstStepIsLrTimesSign) {
  AdamState s(3, AdamConfig{});
  std::vector<double> x = {1.0, -2.0, 5.0};
  const std::vector<double> g = {3.0, -0.01, 0.0};
  adam_step(s, x, g);
  EXPECT_NEAR(x[0], 1.0 - 0.08, 1e-8);
  EXPECT_NEAR(x[1], -2.0 + 0.08, 1e-6);
  EXPECT_EQ(x[2], 5.0);
  EXPECT_EQ(s.t, 1);
}

TEST(AdamStep, StepsBoundedByLr) {
  AdamState s(1, AdamConfig{});
  std::vector<double> x = {0.0};
  const std::vector<double> g1 = {10.0}, g2 = {0.1};
  adam_step(s, x, g1);
  adam_step(s, x, g2);
  EXPECT_LT(x[0], 0.0);
  EXPECT_LE(std::abs(x[0]), 2 * 0.08 + 1e-12);
}

TEST(AdamStep, RejectsBadInput) {
  AdamState s(2, AdamConfig{});
  std::vector<double> x = {0.0, 0.0};
  EXPECT_THROW(adam_step(s, x, std::vector<double>{1.0}), Error);
  EXPECT_THROW(adam_step(s, x, std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()}), Error);
}

TEST(InitParameters, BlocksPerCurveAndGroup) {
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{}, 1, 0.0, 20),
                                             testutil::synth_curve(2, 2, MainParams{}, 2, 0.0, 20),
                                             testutil::synth_curve(3, 1, MainParams{}, 3, 0.0, 20)});
  FitConfig cfg;
  auto st = init_parameters(ds, cfg);
  EXPECT_EQ(st.main.size(), 3u);
  EXPECT_EQ(st.groups.size(), 2u);
  EXPECT_EQ(st.main[0].vcmax25, 100.0);
  EXPECT_EQ(st.main[0].tpu25, 25.0);
  EXPECT_EQ(st.groups[0].dha_vcmax, 65.33);
  EXPECT_EQ(st.curve_group[2], st.curve_group[0]);
  EXPECT_EQ(ParamLayout(ds, st, cfg).size(), 3u * 4u + 2u);

  cfg.onefit = true;
  st = init_parameters(ds, cfg);
  EXPECT_EQ(st.main.size(), 2u);
  EXPECT_EQ(st.curve_main[0], st.curve_main[2]);
  EXPECT_NE(st.curve_main[0], st.curve_main[1]);
}

TEST(FitConfig, Validation) {
  FitConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.adam.lr = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.adam.max_iter = 0;  // evaluate only
  EXPECT_NO_THROW(cfg.validate());
  cfg.adam.max_iter = -1;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = {};
  cfg.jobs = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(Fit, RecoversNoiselessCurve) {
  const MainParams truth{90.0, 180.0, 12.0, 1.2};
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, truth, 1, 0.0, 150)});
  const FitResult r = fit(ds, FitConfig{});
  const MainParams& p = r.curves[0].params;
  EXPECT_LT(testutil::rel_err(p.vcmax25, truth.vcmax25), 0.01);
  EXPECT_LT(testutil::rel_err(p.jmax25, truth.jmax25), 0.01);
  EXPECT_LT(testutil::rel_err(p.tpu25, truth.tpu25), 0.01);
  EXPECT_NEAR(p.rd25, truth.rd25, 0.012);
  EXPECT_TRUE(r.curves[0].tpu_stage);
  EXPECT_GT(r.curves[0].metrics.r2, 0.9999);
  EXPECT_LE(r.final_loss.total, r.initial_loss);
  EXPECT_EQ(r.iterations_run, 20000);
}

TEST(Fit, Deterministic) {
  std::vector<ResponseCurve> cs;
  for (int i = 0; i < 4; ++i) cs.push_back(testutil::synth_curve(i + 1, 1 + i % 2, MainParams{}, i + 7, 0.5, 60));
  const Dataset ds = testutil::make_dataset(cs);
  FitConfig cfg = short_config(400);
  const FitResult a = fit(ds, cfg);
  const FitResult b = fit(ds, cfg);
  cfg.jobs = 3;
  const FitResult c = fit(ds, cfg);
  EXPECT_EQ(a.loss_history, b.loss_history);
  EXPECT_EQ(a.loss_history, c.loss_history);
  for (std::size_t i = 0; i < a.curves.size(); ++i) {
    EXPECT_EQ(a.curves[i].params.vcmax25, c.curves[i].params.vcmax25);
    EXPECT_EQ(a.curves[i].params.rd25, b.curves[i].params.rd25);
  }
}

TEST(Fit, BestIterateNeverWorseThanStart) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{140, 250, 18, 0.7}, seed, 1.0, 80)});
    const FitResult r = fit(ds, short_config(300));
    EXPECT_LE(r.final_loss.total, r.initial_loss);
    for (const auto& [it, loss] : r.loss_history) EXPECT_GE(loss, r.final_loss.total) << "iteration " << it;
  }
}

TEST(Fit, OnefitSharesMainParameters) {
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{}, 1, 0.3, 50),
                                             testutil::synth_curve(2, 1, MainParams{}, 2, 0.3, 50),
                                             testutil::synth_curve(3, 2, MainParams{}, 3, 0.3, 50)});
  FitConfig cfg = short_config(300);
  cfg.onefit = true;
  const FitResult r = fit(ds, cfg);
  EXPECT_EQ(r.params.main.size(), 2u);
  EXPECT_EQ(by_id(r, 1).params.vcmax25, by_id(r, 2).params.vcmax25);
  EXPECT_EQ(by_id(r, 1).params.jmax25, by_id(r, 2).params.jmax25);
  EXPECT_NE(by_id(r, 1).params.vcmax25, by_id(r, 3).params.vcmax25);
}

TEST(Fit, CurveOrderDoesNotMatter) {
  const auto c1 = testutil::synth_curve(1, 1, MainParams{80, 170, 13, 1}, 1, 0.4, 50);
  const auto c2 = testutil::synth_curve(2, 1, MainParams{120, 230, 17, 2}, 2, 0.4, 50);
  const FitResult a = fit(testutil::make_dataset({c1, c2}), short_config(500));
  const FitResult b = fit(testutil::make_dataset({c2, c1}), short_config(500));
  for (int id : {1, 2}) {
    EXPECT_NEAR(by_id(a, id).params.vcmax25, by_id(b, id).params.vcmax25, 1e-6);
    EXPECT_NEAR(by_id(a, id).params.jmax25, by_id(b, id).params.jmax25, 1e-6);
    EXPECT_NEAR(by_id(a, id).params.rd25, by_id(b, id).params.rd25, 1e-6);
  }
}

TEST(Fit, NoTpuStageDetected) {
  const MainParams truth{90.0, 180.0, 40.0, 1.2};
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, truth, 1, 0.0, 150)});
  const FitResult r = fit(ds, short_config(5000));
  EXPECT_FALSE(r.curves[0].tpu_stage);
  EXPECT_GE(r.curves[0].tpu_gap, -kTpuStageMargin);
}

TEST(Fit, RdStaysNonNegative) {
  std::vector<ResponseCurve> cs;
  for (int i = 0; i < 5; ++i) cs.push_back(testutil::synth_curve(i + 1, 1, MainParams{100, 200, 15, 0.02}, i, 1.0, 40));
  const FitResult r = fit(testutil::make_dataset(cs), short_config(3000));
  for (const auto& c : r.curves) EXPECT_GE(c.params.rd25, 0.0);

  FitConfig free = short_config(3000);
  free.penalties.positive_rd = false;
  EXPECT_NO_THROW(fit(testutil::make_dataset(cs), free));
}

TEST(Fit, ProgressCallbackAndHistory) {
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{}, 1, 0.2, 40)});
  FitConfig cfg = short_config(1000);
  cfg.progress_interval = 250;
  std::vector<int> seen;
  cfg.on_progress = [&](int it, double) { seen.push_back(it); };
  const FitResult r = fit(ds, cfg);
  EXPECT_FALSE(seen.empty());
  EXPECT_FALSE(r.loss_history.empty());
  EXPECT_EQ(r.predictions.size(), 40u);
}

TEST(Fit, LightCurveGetsNoTpu) {
  SynthSpec s;
  s.kind = CurveKind::kLightResponse;
  s.light = LightResponse::kNonRectangular;
  s.grid = linear_grid(0.0, 2000.0, 25);
  const Dataset ds = testutil::make_dataset({generate_curve(s).curve});
  FitConfig cfg = short_config(500);
  cfg.light = LightResponse::kNonRectangular;
  const FitResult r = fit(ds, cfg);
  EXPECT_FALSE(r.fitted[static_cast<int>(ParamId::kTpu25)]);
  EXPECT_TRUE(r.fitted[static_cast<int>(ParamId::kTheta)]);
  EXPECT_TRUE(std::isnan(r.curves[0].tpu_gap));
  EXPECT_FALSE(r.curves[0].tpu_stage);
}
