#pragma once

#include <filesystem>
#include <ostream>
#include <string>

#include "fvcbfit/optimizer.hpp"

namespace fvcb {

enum class ResultFormat { kCsv, kJson };

struct ResultPaths {
  std::filesystem::path curves;
  std::filesystem::path groups;  // same as `curves` for JSON
  std::filesystem::path points;  // same as `curves` for JSON
};

/// CSV output is split into `<path>`, `<stem>.groups.csv` and
/// `<stem>.points.csv`; JSON goes to a single document at `path`.
ResultPaths result_paths(const std::filesystem::path& path, ResultFormat format);

void write_curves_csv(const FitResult& result, std::ostream& out);
void write_groups_csv(const FitResult& result, std::ostream& out);
void write_points_csv(const FitResult& result, std::ostream& out);
std::string results_json(const FitResult& result, bool include_points);

void write_results(const FitResult& result, const std::filesystem::path& path, ResultFormat format,
                   bool include_points);

}  // namespace fvcb
