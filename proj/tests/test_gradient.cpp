#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fvcbfit/fvcbfit.hpp"
#include "gradient_oracle.hpp"
#include "test_util.hpp"

using namespace fvcb;

using testutil::Draw;

TEST(GradientOracle, RandomDrawsMatchFiniteDifferences) {
  std::mt19937_64 rng(2024);
  std::size_t checked = 0;
  for (int k = 0; k < 100; ++k) {
    const Draw d = testutil::random_draw(rng, k);
    const ParamLayout layout(d.ds, d.st, d.cfg);
    const auto lg = loss_gradient(d.ds, d.st, d.cfg, layout);
    EXPECT_NEAR(lg.loss.total, total_loss(d.ds, d.st, d.cfg).total, 1e-9 * std::max(1.0, lg.loss.total));
    ASSERT_EQ(lg.grad.size(), layout.size());
    for (std::size_t i = 0; i < layout.size(); ++i) {
      const double fd = testutil::central_difference(d, layout, i);
      EXPECT_TRUE(testutil::gradient_close(lg.grad.values[i], fd))
          << "draw " << k << " " << param_name(layout.slots()[i].id) << "[" << layout.slots()[i].block
          << "] analytic " << lg.grad.values[i] << " fd " << fd;
      ++checked;
    }
  }
  EXPECT_GT(checked, 1000u);
}

TEST(Gradient, QuadraticToy) {
  // Measured A = 0 at Rubisco-limited points: d mse / d Vcmax = 2/n sum(k_i * A_hat_i)
  // with A_hat_i = Vcmax * k_i - Rd.
  std::vector<double> ci = {60, 80, 100, 120, 140, 160};
  const auto curve = testutil::make_curve(1, 1, ci, std::vector<double>(ci.size(), 0.0), 2000.0, 24.85);
  const Dataset ds = testutil::make_dataset({curve});
  FitConfig cfg;
  cfg.penalties.enabled = false;
  auto st = init_parameters(ds, cfg);
  st.main[0] = {80.0, 400.0, 30.0, 1.2};
  const auto lg = loss_gradient(ds, st, cfg);
  const GroupParams g;
  const double kprime = g.kc25 * (1.0 + 210.0 / g.ko25);
  double expected = 0.0;
  for (std::size_t i = 0; i < ci.size(); ++i) {
    const double c = ci[i];
    const double k = c / (c + kprime) * (1.0 - g.gamma25 / c);
    ASSERT_EQ(net_assimilation(ds, st, cfg, 0, i).state, LimitingState::kRubisco);
    expected += 2.0 * k * (80.0 * k - 1.2);
  }
  expected /= static_cast<double>(ci.size());
  EXPECT_NEAR(*lg.grad.find(ParamId::kVcmax25, 0), expected, 1e-10 * std::abs(expected));
}

TEST(Gradient, FrozenParametersAbsent) {
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{}, 1, 0.0, 30)});
  FitConfig cfg;
  const auto lg = loss_gradient(ds, init_parameters(ds, cfg), cfg);
  EXPECT_FALSE(lg.grad.find(ParamId::kAlpha, 0).has_value());
  EXPECT_FALSE(lg.grad.find(ParamId::kTheta, 0).has_value());
  EXPECT_FALSE(lg.grad.find(ParamId::kDhaVcmax, 0).has_value());
  EXPECT_FALSE(lg.grad.find(ParamId::kGm, 0).has_value());
  EXPECT_TRUE(lg.grad.find(ParamId::kVcmax25, 0).has_value());
  EXPECT_TRUE(lg.grad.find(ParamId::kAlphaGRaw, 0).has_value());
  EXPECT_EQ(lg.grad.size(), 5u);

  SynthSpec s;
  s.kind = CurveKind::kLightResponse;
  s.light = LightResponse::kNonRectangular;
  s.grid = linear_grid(0.0, 2000.0, 10);
  const Dataset light = testutil::make_dataset({generate_curve(s).curve});
  cfg.light = LightResponse::kNonRectangular;
  const auto lg2 = loss_gradient(light, init_parameters(light, cfg), cfg);
  EXPECT_FALSE(lg2.grad.find(ParamId::kTpu25, 0).has_value());
  EXPECT_FALSE(lg2.grad.find(ParamId::kAlphaGRaw, 0).has_value());
  EXPECT_TRUE(lg2.grad.find(ParamId::kAlpha, 0).has_value());
  EXPECT_TRUE(lg2.grad.find(ParamId::kTheta, 0).has_value());
}

TEST(Gradient, ZeroAtInterpolatingPoint) {
  const MainParams truth{100.0, 200.0, 14.5, 1.5};
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, truth, 1, 0.0, 150, 24.85),
                                             testutil::synth_curve(2, 1, truth, 1, 0.0, 150, 24.85)});
  FitConfig cfg;
  auto st = init_parameters(ds, cfg);
  for (auto& m : st.main) m = truth;
  const auto lg = loss_gradient(ds, st, cfg);
  EXPECT_EQ(lg.loss.penalty_sum(), 0.0);
  for (double g : lg.grad.values) EXPECT_NEAR(g, 0.0, 1e-12);
}

TEST(Gradient, SumOverCurves) {
  const auto c1 = testutil::synth_curve(1, 1, MainParams{90, 180, 15, 1}, 3, 0.5, 40);
  const auto c2 = testutil::synth_curve(2, 1, MainParams{110, 220, 16, 2}, 4, 0.5, 55);
  FitConfig cfg;
  cfg.penalties.enabled = false;
  const Dataset both = testutil::make_dataset({c1, c2});
  const Dataset one = testutil::make_dataset({c1});
  const Dataset two = testutil::make_dataset({c2});
  const auto g = loss_gradient(both, init_parameters(both, cfg), cfg);
  const auto g1 = loss_gradient(one, init_parameters(one, cfg), cfg);
  const auto g2 = loss_gradient(two, init_parameters(two, cfg), cfg);
  const double n1 = 40, n2 = 55, n = 95;
  for (ParamId id : {ParamId::kVcmax25, ParamId::kJmax25, ParamId::kTpu25, ParamId::kRd25}) {
    EXPECT_NEAR(*g.grad.find(id, 0) * n, *g1.grad.find(id, 0) * n1, 1e-9);
    EXPECT_NEAR(*g.grad.find(id, 1) * n, *g2.grad.find(id, 0) * n2, 1e-9);
  }
  EXPECT_NEAR(*g.grad.find(ParamId::kAlphaGRaw, 0) * n,
              *g1.grad.find(ParamId::kAlphaGRaw, 0) * n1 + *g2.grad.find(ParamId::kAlphaGRaw, 0) * n2, 1e-9);
}

TEST(Gradient, DeterministicAcrossThreadCounts) {
  std::vector<ResponseCurve> cs;
  for (int i = 0; i < 9; ++i) cs.push_back(testutil::synth_curve(i + 1, 1 + i % 3, MainParams{}, i, 0.7, 60));
  const Dataset ds = testutil::make_dataset(cs);
  FitConfig cfg;
  cfg.temp = TempResponse::kPeaked;
  const auto st = init_parameters(ds, cfg);
  const auto a = loss_gradient(ds, st, cfg);
  const auto b = loss_gradient(ds, st, cfg);
  cfg.jobs = 4;
  const auto c = loss_gradient(ds, st, cfg);
  EXPECT_EQ(a.grad.values, b.grad.values);
  EXPECT_EQ(a.grad.values, c.grad.values);
  EXPECT_EQ(a.loss.total, c.loss.total);
}

TEST(Gradient, DetachedTpuTargetDropsAjTerm) {
  // Default parameters put A_p far above A_j at the last point, so the
  // transition penalty is active.
  const Dataset ds = testutil::make_dataset({testutil::synth_curve(1, 1, MainParams{}, 1, 0.3, 40)});
  FitConfig cfg;
  const auto st = init_parameters(ds, cfg);
  const ParamLayout layout(ds, st, cfg);
  const auto exact = loss_gradient(ds, st, cfg, layout, GradientMode::kExact);
  const auto detached = loss_gradient(ds, st, cfg, layout, GradientMode::kDetachTpuTarget);
  ASSERT_GT(exact.loss.p_j_lt_p, 0.0);
  EXPECT_EQ(exact.loss.total, detached.loss.total);

  const std::size_t last = ds.curves[0].records.size() - 1;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    // The exact gradient carries -dA_j(last)/dθ from the penalty; the detached one does not.
    std::vector<double> x = layout.gather(st);
    const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    ParameterState plus = st, minus = st;
    x[i] += h;
    layout.scatter(x, plus);
    x[i] -= 2 * h;
    layout.scatter(x, minus);
    const double daj =
        (net_assimilation(ds, plus, cfg, 0, last).aj - net_assimilation(ds, minus, cfg, 0, last).aj) / (2 * h);
    EXPECT_NEAR(detached.grad.values[i] - daj, exact.grad.values[i], 1e-6 * std::max(1.0, std::abs(daj)))
        << param_name(layout.slots()[i].id);
  }
}
