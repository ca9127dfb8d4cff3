#pragma once

#include <cstddef>
#include <map>
#include <vector>

namespace fvcb {

inline constexpr double kKelvinOffset = 273.15;

/// One measured gas-exchange point. Leaf temperature is kept in Celsius.
struct GasExchangeRecord {
  int curve_id = 0;
  int fitting_group = 0;
  double ci = 0.0;    // µmol/mol
  double a = 0.0;     // µmol/m²/s
  double qin = 0.0;   // µmol/m²/s
  double tleaf_c = 0.0;

  double tleaf_k() const { return tleaf_c + kKelvinOffset; }
};

enum class CurveKind { kCO2Response, kLightResponse };

struct ResponseCurve {
  int curve_id = 0;
  int fitting_group = 0;
  std::vector<GasExchangeRecord> records;
  CurveKind kind = CurveKind::kCO2Response;
  double tleaf_k_mean = 0.0;

  std::size_t size() const { return records.size(); }
  bool is_light() const { return kind == CurveKind::kLightResponse; }
};

/// Curves in order of first appearance; `groups` maps each fitting group id
/// to positions in `curves`.
struct Dataset {
  std::vector<ResponseCurve> curves;
  std::map<int, std::vector<std::size_t>> groups;

  std::size_t total_points() const;
  bool all_light() const;
};

/// Recomputes `groups` and each curve's mean temperature from `curves`.
void rebuild_index(Dataset& dataset);

}  // namespace fvcb
