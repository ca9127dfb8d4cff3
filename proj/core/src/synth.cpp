#include "fvcbfit/synth.hpp"

#include <string>

#include "fvcbfit/error.hpp"
#include "fvcbfit/model.hpp"

namespace fvcb {

std::vector<double> linear_grid(double first, double last, std::size_t count) {
  std::vector<double> grid(count);
  if (count == 1) {
    grid[0] = first;
    return grid;
  }
  const double step = (last - first) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) grid[i] = first + step * static_cast<double>(i);
  grid.back() = last;
  return grid;
}

std::vector<double> default_ci_grid() { return linear_grid(50.0, 1800.0, 150); }

MainParams jitter_main(const MainParams& main, double fraction, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> scale(1.0 - fraction, 1.0 + fraction);
  MainParams out = main;
  out.vcmax25 *= scale(rng);
  out.jmax25 *= scale(rng);
  out.tpu25 *= scale(rng);
  out.rd25 *= scale(rng);
  return out;
}

SyntheticCurve generate_curve(const SynthSpec& spec) {
  if (!(spec.noise_sd >= 0.0)) throw Error(ErrorCode::kInvalidConfig, "noise_sd must be >= 0");
  if (spec.grid.empty()) throw Error(ErrorCode::kInvalidConfig, "synthesis grid is empty");
  for (std::size_t i = 1; i < spec.grid.size(); ++i) {
    if (!(spec.grid[i] > spec.grid[i - 1])) {
      throw Error(ErrorCode::kInvalidConfig, "synthesis grid must be strictly increasing");
    }
  }
  if (spec.jitter && !(spec.scale_jitter >= 0.0 && spec.scale_jitter < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "scale_jitter must lie in [0, 1)");
  }

  std::mt19937_64 rng(spec.seed);
  SyntheticCurve out;
  out.truth = spec.jitter ? jitter_main(spec.main, spec.scale_jitter, rng) : spec.main;

  ModelOptions opt;
  opt.light = spec.light;
  opt.temp = spec.temp;
  opt.exclude_tpu = spec.kind == CurveKind::kLightResponse;

  auto& curve = out.curve;
  curve.curve_id = spec.curve_id;
  curve.fitting_group = spec.fitting_group;
  curve.kind = spec.kind;
  std::normal_distribution<double> noise(0.0, spec.noise_sd > 0.0 ? spec.noise_sd : 1.0);
  for (double x : spec.grid) {
    GasExchangeRecord rec;
    rec.curve_id = spec.curve_id;
    rec.fitting_group = spec.fitting_group;
    rec.tleaf_c = spec.tleaf_c;
    if (spec.kind == CurveKind::kLightResponse) {
      rec.ci = spec.ci;
      rec.qin = x;
    } else {
      rec.ci = x;
      rec.qin = spec.qin;
    }
    rec.a = net_assimilation(rec, out.truth, spec.group, spec.constants, opt).a;
    if (spec.noise_sd > 0.0) rec.a += noise(rng);
    curve.records.push_back(rec);
  }
  curve.tleaf_k_mean = spec.tleaf_c + kKelvinOffset;
  return out;
}

}  // namespace fvcb
