#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fvcbfit/fvcbfit.hpp"

using namespace fvcb;

using V = std::vector<double>;

TEST(Rmse, Examples) {
  EXPECT_EQ(rmse(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_NEAR(rmse(V{3, 4}, V{0, 0}), std::sqrt(12.5), 1e-15);
  EXPECT_NEAR(rmse(V{3, 4}, V{0, 0}), 3.5355, 1e-4);
  EXPECT_DOUBLE_EQ(rmse(V{-2.5}, V{0.0}), 2.5);
  EXPECT_THROW(rmse(V{1}, V{1, 2}), Error);
}

TEST(RSquared, Examples) {
  const V a = {1, 3, 2, 5, 4};
  EXPECT_EQ(r_squared(a, a), 1.0);
  EXPECT_NEAR(r_squared(a, V(5, 3.0)), 0.0, 1e-15);
  EXPECT_LT(r_squared(a, V{5, 1, 4, 0, 9}), 0.0);
  try {
    r_squared(V{2, 2, 2}, V{1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kZeroVariance);
  }
}

TEST(Pearson, Examples) {
  const V x = {1, 2, 4, 7, 11};
  V neg, aff;
  for (double v : x) {
    neg.push_back(-v);
    aff.push_back(2 * v + 3);
  }
  EXPECT_NEAR(pearson_r(x, x), 1.0, 1e-15);
  EXPECT_NEAR(pearson_r(x, neg), -1.0, 1e-15);
  EXPECT_NEAR(pearson_r(x, aff), 1.0, 1e-15);
  EXPECT_THROW(pearson_r(x, V(5, 1.0)), Error);
}

TEST(MetricsProperty, ConsistencyAndInvariance) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int it = 0; it < 50; ++it) {
    V a(25), b(25);
    for (int i = 0; i < 25; ++i) {
      a[i] = 10 * n(rng);
      b[i] = a[i] + n(rng);
    }
    double ss = 0.0;
    for (int i = 0; i < 25; ++i) ss += (a[i] - b[i]) * (a[i] - b[i]);
    const double r = rmse(a, b);
    EXPECT_NEAR(r * r * 25.0, ss, 1e-9 * ss);
    EXPECT_NEAR(r * r, mse(a, b), 1e-12);
    EXPECT_LE(r_squared(a, b), 1.0);

    V a2, b2;
    for (int i = 0; i < 25; ++i) {
      a2.push_back(3.0 * a[i] + 7.0);
      b2.push_back(0.5 * b[i] - 2.0);
    }
    EXPECT_NEAR(pearson_r(a, b), pearson_r(a2, b2), 1e-12);
    const double p = pearson_r(a, b);
    EXPECT_GE(p, -1.0);
    EXPECT_LE(p, 1.0);
  }
}

TEST(MetricsProperty, PerfectIffZeroRmse) {
  const V a = {1, 5, 2, 8};
  EXPECT_EQ(r_squared(a, a) == 1.0, rmse(a, a) == 0.0);
  const V b = {1, 5, 2, 8.001};
  EXPECT_LT(r_squared(a, b), 1.0);
  EXPECT_GT(rmse(a, b), 0.0);
}

TEST(CurveMetrics, ConstantMeasurementGivesNanR2) {
  const auto m = curve_metrics(V{2, 2, 2}, V{2, 2.1, 1.9});
  EXPECT_TRUE(std::isnan(m.r2));
  EXPECT_EQ(m.n_points, 3u);
  EXPECT_GT(m.rmse, 0.0);
}
