#include "fvcbfit/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fvcbfit/error.hpp"

namespace fvcb {

void PreprocessConfig::validate() const {
  if (window_len < 3) throw Error(ErrorCode::kInvalidConfig, "window_len must be >= 3");
  if (!(jump_up > 0.0) || !(jump_down < 0.0)) {
    throw Error(ErrorCode::kInvalidConfig, "jump thresholds must satisfy jump_up > 0 > jump_down");
  }
  if (min_points_factor < 0) throw Error(ErrorCode::kInvalidConfig, "min_points_factor must be >= 0");
  if (max_trim_fraction < 0.0 || max_trim_fraction > 0.5) {
    throw Error(ErrorCode::kInvalidConfig, "max_trim_fraction must lie in [0, 0.5]");
  }
}

std::vector<double> sg_smooth_linear(std::span<const double> values, int window_len) {
  if (window_len < 1) throw Error(ErrorCode::kInvalidConfig, "window length must be positive");
  const std::size_t n = values.size();
  if (n < static_cast<std::size_t>(window_len)) {
    throw Error(ErrorCode::kSeriesTooShort, "series of length " + std::to_string(n) +
                                                " is shorter than window " + std::to_string(window_len));
  }
  const std::size_t half = static_cast<std::size_t>(window_len) / 2;  // even lengths round up to 2*half+1
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t h = std::min({half, i, n - 1 - i});
    // A least-squares line over a symmetric window evaluates to the window
    // mean at its centre.
    double sum = 0.0;
    for (std::size_t k = i - h; k <= i + h; ++k) sum += values[k];
    out[i] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

ResponseCurve preprocess_curve(const ResponseCurve& curve, const PreprocessConfig& cfg) {
  cfg.validate();
  const std::size_t n = curve.records.size();
  if (curve.is_light()) return curve;
  if (n < static_cast<std::size_t>(cfg.min_points_factor) * static_cast<std::size_t>(cfg.window_len)) {
    return curve;
  }

  // Work in Ci-ascending order; `order` holds indices into curve.records.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return curve.records[x].ci < curve.records[y].ci; });
  std::vector<double> a(n);
  for (std::size_t i = 0; i < n; ++i) a[i] = curve.records[i].a;

  // End artifacts. The high-Ci end is trimmed on either jump direction; the
  // low-Ci end only on a downward step, since a steep rise there is the
  // Rubisco-limited signal itself.
  const auto cap = static_cast<std::size_t>(std::floor(cfg.max_trim_fraction * static_cast<double>(n)));
  std::size_t lo = 0, hi = n;  // survivors are order[lo, hi)
  for (std::size_t removed = 0; removed < cap && hi - lo > 2; ++removed) {
    const double d = a[order[hi - 1]] - a[order[hi - 2]];
    if (d > cfg.jump_up || d < cfg.jump_down) {
      --hi;
    } else {
      break;
    }
  }
  for (std::size_t removed = 0; removed < cap && hi - lo > 2; ++removed) {
    const double d = a[order[lo + 1]] - a[order[lo]];
    if (d < cfg.jump_down) {
      ++lo;
    } else {
      break;
    }
  }
  std::vector<std::size_t> kept(order.begin() + static_cast<std::ptrdiff_t>(lo),
                                order.begin() + static_cast<std::ptrdiff_t>(hi));

  // Smooth the high-Ci region.
  std::vector<std::size_t> high;
  for (std::size_t idx : kept) {
    if (curve.records[idx].ci > cfg.smooth_ci_threshold) high.push_back(idx);
  }
  if (high.size() >= 3) {
    int window = cfg.window_len | 1;
    if (static_cast<std::size_t>(window) > high.size()) {
      window = static_cast<int>(high.size()) % 2 == 1 ? static_cast<int>(high.size())
                                                      : static_cast<int>(high.size()) - 1;
    }
    std::vector<double> series(high.size());
    for (std::size_t i = 0; i < high.size(); ++i) series[i] = a[high[i]];
    auto smoothed = sg_smooth_linear(series, window);
    for (std::size_t i = 0; i < high.size(); ++i) a[high[i]] = smoothed[i];
  }

  // Low-Ci hook: drop everything left of the minimum-A point, then anything
  // below the A of the minimum-Ci survivor.
  if (!kept.empty()) {
    auto min_a = std::min_element(kept.begin(), kept.end(),
                                  [&](std::size_t x, std::size_t y) { return a[x] < a[y]; });
    const double ci_at_min_a = curve.records[*min_a].ci;
    std::erase_if(kept, [&](std::size_t idx) { return curve.records[idx].ci < ci_at_min_a; });
  }
  if (!kept.empty()) {
    auto min_ci = std::min_element(kept.begin(), kept.end(), [&](std::size_t x, std::size_t y) {
      return curve.records[x].ci < curve.records[y].ci;
    });
    const double a_at_min_ci = a[*min_ci];
    std::erase_if(kept, [&](std::size_t idx) { return a[idx] < a_at_min_ci; });
  }

  if (kept.size() < 5) {
    throw Error(ErrorCode::kTooFewPoints, "curve " + std::to_string(curve.curve_id) + " keeps only " +
                                              std::to_string(kept.size()) + " points after preprocessing");
  }
  std::sort(kept.begin(), kept.end());
  ResponseCurve out = curve;
  out.records.clear();
  for (std::size_t idx : kept) {
    GasExchangeRecord rec = curve.records[idx];
    rec.a = a[idx];
    out.records.push_back(rec);
  }
  double sum = 0.0;
  for (const auto& r : out.records) sum += r.tleaf_k();
  out.tleaf_k_mean = sum / static_cast<double>(out.records.size());
  return out;
}

Dataset preprocess_dataset(const Dataset& dataset, const PreprocessConfig& cfg) {
  Dataset out;
  out.curves.reserve(dataset.curves.size());
  for (const auto& curve : dataset.curves) out.curves.push_back(preprocess_curve(curve, cfg));
  rebuild_index(out);
  return out;
}

}  // namespace fvcb
