#pragma once

#include <cstddef>
#include <span>

namespace fvcb {

struct CurveMetrics {
  double rmse = 0.0;
  double r2 = 0.0;  // NaN when the measured series has no variance
  std::size_t n_points = 0;
};

/// Per-point root mean squared error.
double rmse(std::span<const double> measured, std::span<const double> predicted);

/// 1 - SS_res / SS_tot. Throws ZeroVariance when the measured series is constant.
double r_squared(std::span<const double> measured, std::span<const double> predicted);

double pearson_r(std::span<const double> x, std::span<const double> y);

CurveMetrics curve_metrics(std::span<const double> measured, std::span<const double> predicted);

}  // namespace fvcb
