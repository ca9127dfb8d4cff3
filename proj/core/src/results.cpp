#include "fvcbfit/results.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include <json.hpp>

#include "fvcbfit/error.hpp"
#include "fvcbfit/format.hpp"

namespace fvcb {

namespace {

const char* kind_name(CurveKind kind) { return kind == CurveKind::kLightResponse ? "light" : "co2"; }

std::string num(double v) { return std::isfinite(v) ? format_double(v) : std::string("NA"); }

struct GroupColumn {
  ParamId id;
  const char* name;
  double (*get)(const GroupParams&);
};

// Fitted group-level parameters in output order; α_g is reported squashed.
std::vector<GroupColumn> group_columns(const FitResult& result) {
  static const GroupColumn all[] = {
      {ParamId::kDhaVcmax, "dHa_Vcmax", [](const GroupParams& g) { return g.dha_vcmax; }},
      {ParamId::kDhaJmax, "dHa_Jmax", [](const GroupParams& g) { return g.dha_jmax; }},
      {ParamId::kDhaTpu, "dHa_TPU", [](const GroupParams& g) { return g.dha_tpu; }},
      {ParamId::kToptVcmax, "Topt_Vcmax", [](const GroupParams& g) { return g.topt_vcmax; }},
      {ParamId::kToptJmax, "Topt_Jmax", [](const GroupParams& g) { return g.topt_jmax; }},
      {ParamId::kToptTpu, "Topt_TPU", [](const GroupParams& g) { return g.topt_tpu; }},
      {ParamId::kAlpha, "alpha", [](const GroupParams& g) { return g.alpha; }},
      {ParamId::kTheta, "theta", [](const GroupParams& g) { return g.theta; }},
      {ParamId::kAlphaGRaw, "alphaG", [](const GroupParams& g) { return g.alpha_g(); }},
      {ParamId::kGm, "gm", [](const GroupParams& g) { return g.gm; }},
      {ParamId::kKc25, "Kc25", [](const GroupParams& g) { return g.kc25; }},
      {ParamId::kKo25, "Ko25", [](const GroupParams& g) { return g.ko25; }},
      {ParamId::kGamma25, "Gamma25", [](const GroupParams& g) { return g.gamma25; }},
  };
  std::vector<GroupColumn> cols;
  for (const auto& c : all) {
    if (result.fitted[static_cast<int>(c.id)]) cols.push_back(c);
  }
  return cols;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot open output file '" + path.string() + "'");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw Error(ErrorCode::kIoError, "failed writing '" + path.string() + "'");
}

double json_num(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

ResultPaths result_paths(const std::filesystem::path& path, ResultFormat format) {
  if (format == ResultFormat::kJson) return {path, path, path};
  const auto dir = path.parent_path();
  const auto stem = path.stem().string();
  return {path, dir / (stem + ".groups.csv"), dir / (stem + ".points.csv")};
}

void write_curves_csv(const FitResult& result, std::ostream& out) {
  out << "CurveID,FittingGroup,Kind,Vcmax25,Jmax25,TPU25,Rd25,RMSE,R2,NPoints,TPUGap,TPUStage\n";
  for (const auto& c : result.curves) {
    out << c.curve_id << ',' << c.fitting_group << ',' << kind_name(c.kind) << ',' << num(c.params.vcmax25) << ','
        << num(c.params.jmax25) << ',' << (result.fitted[static_cast<int>(ParamId::kTpu25)] ? num(c.params.tpu25) : "NA")
        << ',' << num(c.params.rd25) << ',' << num(c.metrics.rmse) << ',' << num(c.metrics.r2) << ','
        << c.metrics.n_points << ',' << num(c.tpu_gap) << ',' << (c.tpu_stage ? 1 : 0) << '\n';
  }
}

void write_groups_csv(const FitResult& result, std::ostream& out) {
  const auto cols = group_columns(result);
  out << "FittingGroup";
  for (const auto& c : cols) out << ',' << c.name;
  out << '\n';
  for (const auto& g : result.groups) {
    out << g.fitting_group;
    for (const auto& c : cols) out << ',' << num(c.get(g.params));
    out << '\n';
  }
}

void write_points_csv(const FitResult& result, std::ostream& out) {
  out << "CurveID,Ci,A_measured,A_predicted,State\n";
  for (const auto& p : result.predictions) {
    out << p.curve_id << ',' << num(p.ci) << ',' << num(p.a_measured) << ',' << num(p.a_predicted) << ','
        << label(p.state) << '\n';
  }
}

std::string results_json(const FitResult& result, bool include_points) {
  using nlohmann::ordered_json;
  ordered_json doc;
  const bool tpu_fitted = result.fitted[static_cast<int>(ParamId::kTpu25)];
  ordered_json curves = ordered_json::array();
  for (const auto& c : result.curves) {
    ordered_json j;
    j["curve_id"] = c.curve_id;
    j["fitting_group"] = c.fitting_group;
    j["kind"] = kind_name(c.kind);
    j["Vcmax25"] = c.params.vcmax25;
    j["Jmax25"] = c.params.jmax25;
    j["TPU25"] = tpu_fitted ? ordered_json(c.params.tpu25) : ordered_json(nullptr);
    j["Rd25"] = c.params.rd25;
    j["rmse"] = c.metrics.rmse;
    j["r2"] = std::isfinite(c.metrics.r2) ? ordered_json(c.metrics.r2) : ordered_json(nullptr);
    j["n_points"] = c.metrics.n_points;
    j["tpu_gap"] = std::isfinite(c.tpu_gap) ? ordered_json(c.tpu_gap) : ordered_json(nullptr);
    j["tpu_stage"] = c.tpu_stage;
    curves.push_back(std::move(j));
  }
  const auto cols = group_columns(result);
  ordered_json groups = ordered_json::array();
  for (const auto& g : result.groups) {
    ordered_json j;
    j["fitting_group"] = g.fitting_group;
    for (const auto& c : cols) j[c.name] = json_num(c.get(g.params));
    groups.push_back(std::move(j));
  }
  ordered_json summary;
  summary["iterations"] = result.iterations_run;
  summary["initial_loss"] = json_num(result.initial_loss);
  summary["final_loss"] = json_num(result.final_loss.total);
  summary["mse"] = json_num(result.final_loss.mse);
  summary["penalties"] = json_num(result.final_loss.penalty_sum());
  summary["mean_rmse"] = json_num(result.mean_rmse);
  summary["mean_r2"] = std::isfinite(result.mean_r2) ? ordered_json(result.mean_r2) : ordered_json(nullptr);
  doc["summary"] = std::move(summary);
  doc["curves"] = std::move(curves);
  doc["groups"] = std::move(groups);
  if (include_points) {
    ordered_json points = ordered_json::array();
    for (const auto& p : result.predictions) {
      points.push_back({{"curve_id", p.curve_id},
                        {"ci", p.ci},
                        {"a_measured", p.a_measured},
                        {"a_predicted", p.a_predicted},
                        {"state", std::string(1, label(p.state))}});
    }
    doc["points"] = std::move(points);
  }
  return doc.dump(2) + "\n";
}

void write_results(const FitResult& result, const std::filesystem::path& path, ResultFormat format,
                   bool include_points) {
  const auto paths = result_paths(path, format);
  if (format == ResultFormat::kJson) {
    auto out = open_out(paths.curves);
    out << results_json(result, include_points);
    finish(out, paths.curves);
    return;
  }
  {
    auto out = open_out(paths.curves);
    write_curves_csv(result, out);
    finish(out, paths.curves);
  }
  {
    auto out = open_out(paths.groups);
    write_groups_csv(result, out);
    finish(out, paths.groups);
  }
  if (include_points) {
    auto out = open_out(paths.points);
    write_points_csv(result, out);
    finish(out, paths.points);
  }
}

}  // namespace fvcb
