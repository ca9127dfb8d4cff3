#pragma once

#include <filesystem>
#include <istream>
#include <map>
#include <ostream>

#include "fvcbfit/dataset.hpp"

namespace fvcb {

inline constexpr double kDefaultQin = 2000.0;
inline constexpr double kDefaultTleafC = 25.0;

/// Reads the CurveID/FittingGroup/Ci/A[/Qin/Tleaf] table. Rows with Ci <= 0
/// are dropped; curves are classified with classify_curve().
Dataset load_csv(const std::filesystem::path& path);
Dataset parse_csv(std::istream& in, const std::string& source_name = "<stream>");

/// LightResponse when Qin spans more than 100 and Ci stays within 15 % of its
/// mean; everything else (including curves under five points) is CO2Response.
CurveKind classify_curve(const ResponseCurve& curve);

/// Forces the kind of specific curve ids after loading.
void apply_kind_overrides(Dataset& dataset, const std::map<int, CurveKind>& overrides);

/// Writes the dataset back out in the input table layout with round-trip
/// exact numbers.
void write_dataset_csv(const Dataset& dataset, std::ostream& out);
void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path);

}  // namespace fvcb
