#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "fvcbfit/fvcbfit.hpp"
#include "test_util.hpp"

using namespace fvcb;

namespace {

std::vector<double> a_of(const ResponseCurve& c) {
  std::vector<double> a;
  for (const auto& r : c.records) a.push_back(r.a);
  return a;
}

std::vector<double> ci_of(const ResponseCurve& c) {
  std::vector<double> ci;
  for (const auto& r : c.records) ci.push_back(r.ci);
  return ci;
}

}  // namespace

TEST(SgSmooth, ConstantUnchanged) {
  const std::vector<double> v(11, 5.0);
  const auto s = sg_smooth_linear(v, 10);
  for (double x : s) EXPECT_DOUBLE_EQ(x, 5.0);
}

TEST(SgSmooth, LineUnchanged) {
  std::vector<double> v;
  for (int i = 0; i < 25; ++i) v.push_back(2.0 + 0.5 * i);
  for (int w : {3, 10, 11}) {
    const auto s = sg_smooth_linear(v, w);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(s[i], v[i], 1e-12);
  }
}

TEST(SgSmooth, ImpulseSpreadsOverWindow) {
  const std::vector<double> v = {0, 0, 0, 0, 0, 11, 0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(sg_smooth_linear(v, 11)[5], 1.0);
  // Window 10 behaves as 11.
  EXPECT_DOUBLE_EQ(sg_smooth_linear(v, 10)[5], 1.0);
}

TEST(SgSmooth, MatchesCentredMeanOracle) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> v(40);
  for (auto& x : v) x = n(rng);
  const auto s = sg_smooth_linear(v, 7);
  for (std::size_t i = 3; i + 3 < v.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = i - 3; k <= i + 3; ++k) sum += v[k];
    EXPECT_NEAR(s[i], sum / 7.0, 1e-12);
  }
  EXPECT_DOUBLE_EQ(s[0], v[0]);
  EXPECT_NEAR(s[1], (v[0] + v[1] + v[2]) / 3.0, 1e-12);
}

TEST(SgSmooth, TooShort) {
  const std::vector<double> v(5, 1.0);
  try {
    sg_smooth_linear(v, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSeriesTooShort);
  }
}

TEST(PreprocessConfig, Validation) {
  PreprocessConfig c;
  EXPECT_NO_THROW(c.validate());
  c.window_len = 2;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.jump_up = -0.1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.jump_down = 0.1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Preprocess, ShortSteadyStateCurveUnchanged) {
  const auto c = testutil::make_curve(1, 1, {50, 100, 200, 300, 400, 600, 800, 1000, 1200, 1500},
                                      {-1, 3, 10, 20, 25, 27, 22, 29, 30, 35});
  const auto out = preprocess_curve(c, PreprocessConfig{});
  EXPECT_EQ(a_of(out), a_of(c));
  EXPECT_EQ(ci_of(out), ci_of(c));
}

TEST(Preprocess, LightCurvesUntouched) {
  auto c = testutil::synth_curve(1, 1, MainParams{}, 1, 0.3, 60);
  c.kind = CurveKind::kLightResponse;
  const auto out = preprocess_curve(c, PreprocessConfig{});
  EXPECT_EQ(a_of(out), a_of(c));
}

TEST(Preprocess, TrailingSpikeRemoved) {
  auto c = testutil::synth_curve(1, 1, MainParams{}, 1, 0.0, 60);
  c.records.back().a = c.records[c.records.size() - 2].a + 0.5;
  const auto out = preprocess_curve(c, PreprocessConfig{});
  ASSERT_EQ(out.records.size(), c.records.size() - 1);
  EXPECT_EQ(out.records.back().ci, c.records[c.records.size() - 2].ci);
}

TEST(Preprocess, MinimumARule) {
  // 8-point curve whose lowest A sits at the third point (Ci = 120).
  const auto c = testutil::make_curve(1, 1, {80, 100, 120, 200, 300, 400, 500, 590},
                                      {4, 2, -1, 5, 10, 12, 12.03, 12.05});
  PreprocessConfig cfg;
  cfg.min_points_factor = 0;
  const auto out = preprocess_curve(c, cfg);
  ASSERT_EQ(out.records.size(), 6u);
  EXPECT_EQ(out.records.front().ci, 120.0);
  for (std::size_t i = 0; i < out.records.size(); ++i) EXPECT_EQ(out.records[i].a, c.records[i + 2].a);
}

TEST(Preprocess, SurvivorsKeepOriginalOrder) {
  auto c = testutil::synth_curve(1, 1, MainParams{}, 3, 0.0, 60);
  std::reverse(c.records.begin(), c.records.end());  // down-ramp
  c.records.front().a += 0.5;                         // spike at the highest Ci
  const auto out = preprocess_curve(c, PreprocessConfig{});
  ASSERT_EQ(out.records.size(), c.records.size() - 1);
  for (std::size_t i = 1; i < out.records.size(); ++i) EXPECT_LT(out.records[i].ci, out.records[i - 1].ci);
}

TEST(Preprocess, TooFewSurvivors) {
  const auto c = testutil::make_curve(1, 1, {50, 100, 150, 200, 250, 300},
                                      {9.0, 8.0, 7.0, 1.0, 6.0, 6.01});
  PreprocessConfig cfg;
  cfg.min_points_factor = 0;
  try {
    preprocess_curve(c, cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewPoints);
  }
}

TEST(PreprocessProperty, CleanCurvesLoseNothing) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SynthSpec s;
    s.grid = default_ci_grid();
    s.jitter = true;
    s.seed = seed;
    s.noise_sd = 0.005;
    const auto c = generate_curve(s).curve;
    const auto out = preprocess_curve(c, PreprocessConfig{});
    EXPECT_EQ(out.records.size(), c.records.size()) << "seed " << seed;
  }
}

TEST(PreprocessProperty, LowCiValuesUntouchedAndSubset) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto c = testutil::synth_curve(1, 1, MainParams{}, seed, 0.2, 150);
    ResponseCurve out;
    try {
      out = preprocess_curve(c, PreprocessConfig{});
    } catch (const Error&) {
      continue;
    }
    EXPECT_LE(out.records.size(), c.records.size());
    for (const auto& r : out.records) {
      auto it = std::find_if(c.records.begin(), c.records.end(), [&](const auto& x) { return x.ci == r.ci; });
      ASSERT_NE(it, c.records.end());
      if (r.ci <= 600.0) EXPECT_EQ(r.a, it->a);
    }
  }
}

TEST(PreprocessDataset, AppliesPerCurve) {
  auto c1 = testutil::synth_curve(1, 1, MainParams{}, 1, 0.0, 60);
  c1.records.back().a += 0.5;
  const auto c2 = testutil::synth_curve(2, 1, MainParams{}, 2, 0.0, 60);
  const Dataset ds = testutil::make_dataset({c1, c2});
  const Dataset out = preprocess_dataset(ds, PreprocessConfig{});
  EXPECT_EQ(out.curves[0].records.size(), 59u);
  EXPECT_EQ(out.curves[1].records.size(), 60u);
  EXPECT_EQ(out.groups.at(1).size(), 2u);
}
