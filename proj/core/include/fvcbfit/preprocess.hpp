#pragma once

#include <span>
#include <vector>

#include "fvcbfit/dataset.hpp"

namespace fvcb {

struct PreprocessConfig {
  int window_len = 10;
  double smooth_ci_threshold = 600.0;
  double jump_up = 0.06;
  double jump_down = -0.06;
  int min_points_factor = 3;
  // Cap on end trimming, as a fraction of the curve, applied to each end.
  double max_trim_fraction = 0.2;

  void validate() const;
};

/// Degree-1 Savitzky-Golay smoothing on a uniformly indexed series. Even
/// window lengths are promoted to the next odd length; near the ends the
/// window shrinks symmetrically so the fit stays centred.
std::vector<double> sg_smooth_linear(std::span<const double> values, int window_len);

/// Cleans one A/Ci curve: end-artifact trimming, smoothing of the high-Ci
/// region and removal of the low-Ci hook. Light curves and curves shorter than
/// min_points_factor * window_len are returned unchanged.
ResponseCurve preprocess_curve(const ResponseCurve& curve, const PreprocessConfig& cfg);

Dataset preprocess_dataset(const Dataset& dataset, const PreprocessConfig& cfg);

}  // namespace fvcb
