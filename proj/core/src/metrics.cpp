#include "fvcbfit/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fvcbfit/error.hpp"

namespace fvcb {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, std::size_t min_len, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kLengthMismatch, std::string(what) + ": lengths " + std::to_string(a.size()) + " and " +
                                                std::to_string(b.size()) + " differ");
  }
  if (a.size() < min_len) {
    throw Error(ErrorCode::kLengthMismatch,
                std::string(what) + ": needs at least " + std::to_string(min_len) + " values");
  }
}

double mean(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

double rmse(std::span<const double> measured, std::span<const double> predicted) {
  check_lengths(measured, predicted, 1, "rmse");
  double sum = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    const double r = measured[i] - predicted[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(measured.size()));
}

double r_squared(std::span<const double> measured, std::span<const double> predicted) {
  check_lengths(measured, predicted, 2, "r_squared");
  const double m = mean(measured);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < measured.size(); ++i) {
    ss_res += (measured[i] - predicted[i]) * (measured[i] - predicted[i]);
    ss_tot += (measured[i] - m) * (measured[i] - m);
  }
  if (!(ss_tot > 0.0)) throw Error(ErrorCode::kZeroVariance, "r_squared: measured series is constant");
  return 1.0 - ss_res / ss_tot;
}

double pearson_r(std::span<const double> x, std::span<const double> y) {
  check_lengths(x, y, 2, "pearson_r");
  const double mx = mean(x), my = mean(y);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) throw Error(ErrorCode::kZeroVariance, "pearson_r: constant series");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CurveMetrics curve_metrics(std::span<const double> measured, std::span<const double> predicted) {
  CurveMetrics out;
  out.n_points = measured.size();
  out.rmse = rmse(measured, predicted);
  try {
    out.r2 = r_squared(measured, predicted);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kZeroVariance && e.code() != ErrorCode::kLengthMismatch) throw;
    out.r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

}  // namespace fvcb
