#include "fvcbfit/data_io.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fvcbfit/error.hpp"
#include "fvcbfit/format.hpp"

namespace fvcb {

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::size_t Dataset::total_points() const {
  std::size_t n = 0;
  for (const auto& c : curves) n += c.size();
  return n;
}

bool Dataset::all_light() const {
  return !curves.empty() &&
         std::all_of(curves.begin(), curves.end(), [](const ResponseCurve& c) { return c.is_light(); });
}

void rebuild_index(Dataset& dataset) {
  dataset.groups.clear();
  for (std::size_t i = 0; i < dataset.curves.size(); ++i) {
    auto& curve = dataset.curves[i];
    dataset.groups[curve.fitting_group].push_back(i);
    double sum = 0.0;
    for (const auto& r : curve.records) sum += r.tleaf_k();
    curve.tleaf_k_mean = curve.records.empty() ? 0.0 : sum / static_cast<double>(curve.records.size());
  }
}

namespace {

std::string_view trim(std::string_view s) {
  const auto not_space = [](char c) { return c != ' ' && c != '\t' && c != '\r' && c != '\n'; };
  auto begin = std::find_if(s.begin(), s.end(), not_space);
  auto end = std::find_if(s.rbegin(), std::string_view::reverse_iterator(begin), not_space).base();
  return std::string_view(begin, static_cast<std::size_t>(end - begin));
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return cells;
}

std::string row_context(const std::string& source, std::size_t row) {
  return source + " row " + std::to_string(row);
}

double parse_number(std::string_view cell, const std::string& column, const std::string& source,
                    std::size_t row) {
  double value = 0.0;
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    throw Error(ErrorCode::kParseError, row_context(source, row) + ": column " + column +
                                            " has non-numeric value '" + std::string(cell) + "'");
  }
  return value;
}

int parse_integer(std::string_view cell, const std::string& column, const std::string& source,
                  std::size_t row) {
  double value = parse_number(cell, column, source, row);
  if (value != static_cast<double>(static_cast<long long>(value)) || std::abs(value) > 2e9) {
    throw Error(ErrorCode::kParseError, row_context(source, row) + ": column " + column +
                                            " must be an integer, got '" + std::string(cell) + "'");
  }
  return static_cast<int>(value);
}

}  // namespace

CurveKind classify_curve(const ResponseCurve& curve) {
  if (curve.records.size() < 5) return CurveKind::kCO2Response;
  auto [qmin, qmax] = std::minmax_element(curve.records.begin(), curve.records.end(),
                                          [](const auto& x, const auto& y) { return x.qin < y.qin; });
  auto [cmin, cmax] = std::minmax_element(curve.records.begin(), curve.records.end(),
                                          [](const auto& x, const auto& y) { return x.ci < y.ci; });
  double ci_mean = 0.0;
  for (const auto& r : curve.records) ci_mean += r.ci;
  ci_mean /= static_cast<double>(curve.records.size());
  const double q_range = qmax->qin - qmin->qin;
  const double ci_range = cmax->ci - cmin->ci;
  if (q_range > 100.0 && ci_range < 0.15 * ci_mean) return CurveKind::kLightResponse;
  return CurveKind::kCO2Response;
}

void apply_kind_overrides(Dataset& dataset, const std::map<int, CurveKind>& overrides) {
  for (const auto& [id, kind] : overrides) {
    auto it = std::find_if(dataset.curves.begin(), dataset.curves.end(),
                           [id = id](const ResponseCurve& c) { return c.curve_id == id; });
    if (it == dataset.curves.end()) {
      throw Error(ErrorCode::kInvalidConfig, "curve kind override names unknown curve " + std::to_string(id));
    }
    it->kind = kind;
  }
}

Dataset parse_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  std::size_t row = 0;
  std::vector<std::string_view> header;
  std::string header_line;
  while (std::getline(in, header_line)) {
    ++row;
    if (row == 1 && header_line.rfind("\xEF\xBB\xBF", 0) == 0) header_line.erase(0, 3);
    if (!trim(header_line).empty()) break;
  }
  if (trim(header_line).empty()) {
    throw Error(ErrorCode::kMissingColumn, source_name + ": no header row");
  }
  header = split(header_line);

  const auto find_column = [&header](std::string_view name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    return std::nullopt;
  };
  const std::array<std::string_view, 4> required = {"CurveID", "FittingGroup", "Ci", "A"};
  std::array<std::size_t, 4> req_idx{};
  for (std::size_t k = 0; k < required.size(); ++k) {
    auto idx = find_column(required[k]);
    if (!idx) {
      throw Error(ErrorCode::kMissingColumn,
                  source_name + ": required column '" + std::string(required[k]) + "' not in header");
    }
    req_idx[k] = *idx;
  }
  const auto qin_idx = find_column("Qin");
  const auto tleaf_idx = find_column("Tleaf");

  Dataset dataset;
  std::map<int, std::size_t> position;
  std::map<int, std::size_t> rows_seen;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto cells = split(line);
    const auto cell = [&](std::size_t idx, std::string_view name) -> std::string_view {
      if (idx >= cells.size()) {
        throw Error(ErrorCode::kParseError, row_context(source_name, row) + ": missing cell for column " +
                                                std::string(name));
      }
      return cells[idx];
    };
    GasExchangeRecord rec;
    rec.curve_id = parse_integer(cell(req_idx[0], "CurveID"), "CurveID", source_name, row);
    rec.fitting_group = parse_integer(cell(req_idx[1], "FittingGroup"), "FittingGroup", source_name, row);
    rec.ci = parse_number(cell(req_idx[2], "Ci"), "Ci", source_name, row);
    rec.a = parse_number(cell(req_idx[3], "A"), "A", source_name, row);
    rec.qin = qin_idx ? parse_number(cell(*qin_idx, "Qin"), "Qin", source_name, row) : kDefaultQin;
    rec.tleaf_c = tleaf_idx ? parse_number(cell(*tleaf_idx, "Tleaf"), "Tleaf", source_name, row)
                            : kDefaultTleafC;
    if (!std::isfinite(rec.ci) || !std::isfinite(rec.a) || !std::isfinite(rec.qin) ||
        !std::isfinite(rec.tleaf_c)) {
      throw Error(ErrorCode::kInvalidValue, row_context(source_name, row) + ": non-finite value");
    }
    if (rec.qin < 0.0) {
      throw Error(ErrorCode::kInvalidValue, row_context(source_name, row) + ": Qin must be >= 0");
    }
    if (rec.tleaf_c < -10.0 || rec.tleaf_c > 60.0) {
      throw Error(ErrorCode::kInvalidValue,
                  row_context(source_name, row) + ": Tleaf outside [-10, 60] degrees Celsius");
    }

    ++rows_seen[rec.curve_id];
    auto [it, inserted] = position.try_emplace(rec.curve_id, dataset.curves.size());
    if (inserted) {
      ResponseCurve curve;
      curve.curve_id = rec.curve_id;
      curve.fitting_group = rec.fitting_group;
      dataset.curves.push_back(std::move(curve));
    }
    auto& curve = dataset.curves[it->second];
    if (curve.fitting_group != rec.fitting_group) {
      throw Error(ErrorCode::kInconsistentGroup,
                  row_context(source_name, row) + ": curve " + std::to_string(rec.curve_id) +
                      " appears in fitting groups " + std::to_string(curve.fitting_group) + " and " +
                      std::to_string(rec.fitting_group));
    }
    if (rec.ci <= 0.0) continue;  // non-positive Ci is rejected
    curve.records.push_back(rec);
  }

  for (const auto& curve : dataset.curves) {
    if (curve.records.empty()) {
      throw Error(ErrorCode::kEmptyCurve, source_name + ": curve " + std::to_string(curve.curve_id) +
                                              " has no rows with Ci > 0 (" +
                                              std::to_string(rows_seen[curve.curve_id]) + " rows read)");
    }
  }
  for (auto& curve : dataset.curves) curve.kind = classify_curve(curve);
  rebuild_index(dataset);
  return dataset;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open input file '" + path.string() + "'");
  return parse_csv(in, path.string());
}

void write_dataset_csv(const Dataset& dataset, std::ostream& out) {
  out << "CurveID,FittingGroup,Ci,A,Qin,Tleaf\n";
  for (const auto& curve : dataset.curves) {
    for (const auto& r : curve.records) {
      out << r.curve_id << ',' << r.fitting_group << ',' << format_double(r.ci) << ','
          << format_double(r.a) << ',' << format_double(r.qin) << ',' << format_double(r.tleaf_c)
          << '\n';
    }
  }
}

void write_dataset_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open output file '" + path.string() + "'");
  write_dataset_csv(dataset, out);
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
}

}  // namespace fvcb
