#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fvcbfit/fvcbfit.hpp"

namespace fvcb::cli {

namespace {

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool quiet = false;
  int verbose = 0;
};

struct KindOverrides {
  std::vector<int> light;
  std::vector<int> co2;

  std::map<int, CurveKind> to_map() const {
    std::map<int, CurveKind> m;
    for (int id : co2) m[id] = CurveKind::kCO2Response;
    for (int id : light) m[id] = CurveKind::kLightResponse;
    return m;
  }
};

struct FitOptions {
  std::string input;
  std::string output;
  std::string format = "csv";
  bool points = false;
  bool preprocess = false;
  PreprocessConfig pre;
  KindOverrides kinds;
  FitConfig config;
  int light_type = 0;
  int temp_type = 0;
  bool allow_negative_rd = false;
  bool no_tpu_penalty = false;
  bool no_penalties = false;
  bool r_penalty = false;
};

struct SynthOptions {
  std::string output;
  std::string truth;
  std::string kind = "co2";
  int curves = 1;
  int first_id = 1;
  int group = 1;
  int n_points = 0;
  double grid_min = -1.0;
  double grid_max = -1.0;
  double noise = 0.0;
  double jitter = 0.0;
  double qin = 2000.0;
  double ci = 300.0;
  double tleaf = 25.0;
  int light_type = 0;
  int temp_type = 0;
  MainParams main;
  GroupParams group_params;
};

struct PreprocessOptions {
  std::string input;
  std::string output;
  PreprocessConfig pre;
  KindOverrides kinds;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

void add_preprocess_flags(CLI::App* app, PreprocessConfig& pre) {
  app->add_option("--window-len", pre.window_len, "Savitzky-Golay window length")->capture_default_str();
  app->add_option("--smooth-ci-threshold", pre.smooth_ci_threshold, "Smooth only points with Ci above this")
      ->capture_default_str();
  app->add_option("--jump-up", pre.jump_up, "Upward jump between consecutive end points that trims them")
      ->capture_default_str();
  app->add_option("--jump-down", pre.jump_down, "Downward jump between consecutive end points that trims them")
      ->capture_default_str();
  app->add_option("--min-points-factor", pre.min_points_factor,
                  "Curves shorter than factor * window are not preprocessed")
      ->capture_default_str();
  app->add_option("--max-trim-fraction", pre.max_trim_fraction, "Largest fraction trimmed from each end")
      ->capture_default_str();
}

void add_kind_flags(CLI::App* app, KindOverrides& kinds) {
  app->add_option("--light-curves", kinds.light, "Curve ids to treat as light-response curves")->delimiter(',');
  app->add_option("--co2-curves", kinds.co2, "Curve ids to treat as CO2-response curves")->delimiter(',');
}

Dataset load_input(const std::string& path, const KindOverrides& kinds) {
  Dataset ds = load_csv(path);
  apply_kind_overrides(ds, kinds.to_map());
  return ds;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDivergence: return kExitDivergence;
    case ErrorCode::kInvalidConfig: return kExitUsage;
    default: return kExitData;
  }
}

void print_summary(const FitResult& r, double seconds, std::ostream& out) {
  out << "curve  group  kind   Vcmax25   Jmax25    TPU25    Rd25    RMSE      R2\n";
  for (const auto& c : r.curves) {
    char line[160];
    std::snprintf(line, sizeof line, "%5d  %5d  %-5s %8.3f %8.3f %8.3f %7.4f %7.4f %7.3f\n", c.curve_id,
                  c.fitting_group, c.kind == CurveKind::kLightResponse ? "light" : "co2", c.params.vcmax25,
                  c.params.jmax25, c.params.tpu25, c.params.rd25, c.metrics.rmse, c.metrics.r2);
    out << line;
  }
  out << "mean RMSE " << fmt("%.4f", r.mean_rmse) << "  mean R2 " << fmt("%.3f", r.mean_r2) << "\n";
  out << "loss " << fmt("%.6g", r.initial_loss) << " -> " << fmt("%.6g", r.final_loss.total) << " after "
      << r.iterations_run << " iterations\n";
  out << "wall-clock " << fmt("%.2f", seconds) << " s\n";
}

void print_group_params(const FitResult& r, std::ostream& out) {
  for (const auto& g : r.groups) {
    out << "group " << g.fitting_group << ":";
    for (int p = kNumMainParams; p < kNumParamIds; ++p) {
      const auto id = static_cast<ParamId>(p);
      if (!r.fitted[p]) continue;
      double v = r.params.get(id, static_cast<std::size_t>(&g - r.groups.data()));
      if (id == ParamId::kAlphaGRaw) {
        out << " alphaG=" << fmt("%.6g", logistic(v));
      } else {
        out << " " << param_name(id) << "=" << fmt("%.6g", v);
      }
    }
    out << "\n";
  }
}

int run_fit(const FitOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  FitConfig cfg = o.config;
  cfg.light = static_cast<LightResponse>(o.light_type);
  cfg.temp = static_cast<TempResponse>(o.temp_type);
  cfg.penalties.enabled = !o.no_penalties;
  cfg.penalties.positive_rd = !o.allow_negative_rd;
  cfg.penalties.tpu_transition = !o.no_tpu_penalty;
  cfg.penalties.vj_correlation = o.r_penalty;
  if (!g.quiet) {
    cfg.on_progress = [&err](int iter, double loss) {
      err << "iter " << iter << "  loss " << fmt("%.6g", loss) << "\n";
    };
  }
  cfg.validate();
  o.pre.validate();

  Dataset ds = load_input(o.input, o.kinds);
  if (o.preprocess) {
    const std::size_t before = ds.total_points();
    ds = preprocess_dataset(ds, o.pre);
    if (!g.quiet) err << "preprocess: " << before << " -> " << ds.total_points() << " points\n";
  }

  const auto t0 = std::chrono::steady_clock::now();
  FitResult result;
  try {
    result = fit(ds, cfg);
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kExitDivergence;
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_results(result, o.output, o.format == "json" ? ResultFormat::kJson : ResultFormat::kCsv, o.points);
  if (!g.quiet) {
    print_summary(result, seconds, out);
    print_group_params(result, out);
    if (g.verbose > 0) {
      const auto& l = result.final_loss;
      out << "loss terms: mse " << fmt("%.6g", l.mse) << " cjp " << fmt("%.6g", l.p_cjp) << " c>j "
          << fmt("%.6g", l.p_c_gt_j) << " c<j " << fmt("%.6g", l.p_c_lt_j) << " j<p " << fmt("%.6g", l.p_j_lt_p)
          << " corr " << fmt("%.6g", l.p_corr) << " nonneg " << fmt("%.6g", l.p_nonneg) << "\n";
    }
  }
  return kExitOk;
}

int run_synth(const SynthOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
  const bool light = o.kind == "light";
  if (o.curves < 1) throw Error(ErrorCode::kInvalidConfig, "--curves must be >= 1");
  if (o.noise < 0.0) throw Error(ErrorCode::kInvalidConfig, "--noise must be >= 0");
  if (o.jitter < 0.0 || o.jitter >= 1.0) throw Error(ErrorCode::kInvalidConfig, "--jitter must lie in [0, 1)");

  std::vector<double> grid;
  if (!light && o.n_points == 0 && o.grid_min < 0.0 && o.grid_max < 0.0) {
    grid = default_ci_grid();
  } else {
    const double lo = o.grid_min >= 0.0 ? o.grid_min : (light ? 0.0 : 50.0);
    const double hi = o.grid_max >= 0.0 ? o.grid_max : (light ? 2000.0 : 1800.0);
    const int n = o.n_points > 0 ? o.n_points : (light ? 25 : 150);
    if (n < 2 || !(hi > lo)) throw Error(ErrorCode::kInvalidConfig, "synthetic grid needs >= 2 points and max > min");
    grid = linear_grid(lo, hi, static_cast<std::size_t>(n));
  }

  // Per-curve seeds derive from the single top-level seed.
  std::mt19937_64 seeder(g.seed);
  Dataset ds;
  std::vector<MainParams> truth;
  for (int i = 0; i < o.curves; ++i) {
    SynthSpec s;
    s.main = o.main;
    s.group = o.group_params;
    s.light = static_cast<LightResponse>(o.light_type);
    s.temp = static_cast<TempResponse>(o.temp_type);
    s.kind = light ? CurveKind::kLightResponse : CurveKind::kCO2Response;
    s.grid = grid;
    s.qin = o.qin;
    s.ci = o.ci;
    s.tleaf_c = o.tleaf;
    s.noise_sd = o.noise;
    s.seed = seeder();
    s.jitter = o.jitter > 0.0;
    s.scale_jitter = o.jitter;
    s.curve_id = o.first_id + i;
    s.fitting_group = o.group;
    auto sc = generate_curve(s);
    ds.curves.push_back(std::move(sc.curve));
    truth.push_back(sc.truth);
  }
  rebuild_index(ds);
  write_dataset_csv(ds, o.output);

  if (!o.truth.empty()) {
    std::ofstream t(o.truth, std::ios::binary);
    if (!t) throw Error(ErrorCode::kIoError, "cannot open " + o.truth + " for writing");
    t << "CurveID,FittingGroup,Vcmax25,Jmax25,TPU25,Rd25\n";
    for (std::size_t i = 0; i < truth.size(); ++i) {
      t << ds.curves[i].curve_id << "," << ds.curves[i].fitting_group << "," << format_double(truth[i].vcmax25)
        << "," << format_double(truth[i].jmax25) << "," << format_double(truth[i].tpu25) << ","
        << format_double(truth[i].rd25) << "\n";
    }
    if (!t) throw Error(ErrorCode::kIoError, "failed writing " + o.truth);
  }
  if (!g.quiet) {
    out << "wrote " << o.curves << " curve(s), " << ds.total_points() << " points to " << o.output << "\n";
  }
  (void)err;
  return kExitOk;
}

int run_preprocess(const PreprocessOptions& o, const GlobalOptions& g, std::ostream& out) {
  o.pre.validate();
  Dataset ds = load_input(o.input, o.kinds);
  const Dataset cleaned = preprocess_dataset(ds, o.pre);
  write_dataset_csv(cleaned, o.output);
  if (!g.quiet) {
    for (std::size_t i = 0; i < ds.curves.size(); ++i) {
      out << "curve " << ds.curves[i].curve_id << ": " << ds.curves[i].records.size() << " -> "
          << cleaned.curves[i].records.size() << " points\n";
    }
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit the FvCB photosynthesis model to gas-exchange response curves", "fvcbfit"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  app.add_option("--seed", global.seed, "Seed for every random draw in the process")->capture_default_str();
  app.add_flag("-q,--quiet", global.quiet, "Machine mode: no progress or summary output");
  app.add_flag("-v,--verbose", global.verbose, "Print the loss breakdown after fitting");

  FitOptions fo;
  auto* fit_cmd = app.add_subcommand("fit", "Fit curves from a CSV file");
  fit_cmd->add_option("input", fo.input, "Input CSV (CurveID, FittingGroup, Ci, A[, Qin, Tleaf])")->required();
  fit_cmd->add_option("-o,--output", fo.output, "Result file")->required();
  fit_cmd->add_option("--format", fo.format, "Result format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  fit_cmd->add_flag("--points", fo.points, "Also write per-point predictions and limiting states");
  fit_cmd->add_flag("--preprocess", fo.preprocess, "Clean A/Ci curves before fitting");
  add_preprocess_flags(fit_cmd, fo.pre);
  add_kind_flags(fit_cmd, fo.kinds);
  fit_cmd->add_option("--lr", fo.config.adam.lr, "Adam learning rate")->capture_default_str();
  fit_cmd->add_option("--max-iter", fo.config.adam.max_iter, "Iteration budget")->capture_default_str();
  fit_cmd->add_flag("--early-stop", fo.config.adam.early_stop,
                    "Stop once the loss changes by less than 1e-7 (relative) over 500 iterations");
  fit_cmd->add_flag("--onefit", fo.config.onefit, "Share Vcmax25, Jmax25, TPU25 and Rd25 within each group");
  fit_cmd->add_flag("--allow-negative-rd", fo.allow_negative_rd, "Drop the non-negativity constraint on Rd25");
  fit_cmd->add_flag("--no-tpu-penalty", fo.no_tpu_penalty, "Disable the TPU-transition penalty");
  fit_cmd->add_flag("--no-penalties", fo.no_penalties, "Fit plain MSE without any penalty");
  fit_cmd->add_flag("--r-penalty", fo.r_penalty,
                    "Penalise Vcmax25/Jmax25 correlation below 0.7 in groups of 7 or more curves");
  fit_cmd->add_option("--beta", fo.config.penalties.beta, "Separation margin of the intersection penalties")
      ->capture_default_str();
  fit_cmd->add_flag("--fit-gm", fo.config.fit_gm, "Fit mesophyll conductance and use Cc = Ci - A/gm");
  fit_cmd->add_flag("--fit-kinetics", fo.config.fit_kinetics, "Fit Kc25, Ko25 and Gamma*25");
  fit_cmd->add_option("--light-type", fo.light_type, "Light response: 0 none, 1 rectangular, 2 non-rectangular")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  fit_cmd->add_option("--temp-type", fo.temp_type, "Temperature response: 0 none, 1 Arrhenius, 2 peaked")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  fit_cmd->add_option("--jobs", fo.config.jobs, "Worker threads; results do not depend on this")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SynthOptions so;
  auto* synth_cmd = app.add_subcommand("synth", "Generate synthetic curves from the forward model");
  synth_cmd->add_option("-o,--output", so.output, "Output CSV")->required();
  synth_cmd->add_option("--truth", so.truth, "Also write the true main parameters of each curve");
  synth_cmd->add_option("--kind", so.kind, "Curve type")->check(CLI::IsMember({"co2", "light"}))->capture_default_str();
  synth_cmd->add_option("--curves", so.curves, "Number of curves")->capture_default_str();
  synth_cmd->add_option("--first-id", so.first_id, "CurveID of the first curve")->capture_default_str();
  synth_cmd->add_option("--group", so.group, "FittingGroup of all curves")->capture_default_str();
  synth_cmd->add_option("--n-points", so.n_points, "Grid size (default 150 Ci values, 25 for light curves)");
  synth_cmd->add_option("--grid-min", so.grid_min, "First grid value (Ci, or PPFD for light curves)");
  synth_cmd->add_option("--grid-max", so.grid_max, "Last grid value");
  synth_cmd->add_option("--noise", so.noise, "Standard deviation of Gaussian noise on A")->capture_default_str();
  synth_cmd->add_option("--jitter", so.jitter, "Scale each main parameter by Uniform[1-f, 1+f]")
      ->capture_default_str();
  synth_cmd->add_option("--qin", so.qin, "PPFD held during A/Ci curves")->capture_default_str();
  synth_cmd->add_option("--ci", so.ci, "Ci held during light curves")->capture_default_str();
  synth_cmd->add_option("--tleaf", so.tleaf, "Leaf temperature in degrees C")->capture_default_str();
  synth_cmd->add_option("--vcmax", so.main.vcmax25, "Vcmax25")->capture_default_str();
  synth_cmd->add_option("--jmax", so.main.jmax25, "Jmax25")->capture_default_str();
  synth_cmd->add_option("--tpu", so.main.tpu25, "TPU25")->capture_default_str();
  synth_cmd->add_option("--rd", so.main.rd25, "Rd25")->capture_default_str();
  synth_cmd->add_option("--alpha", so.group_params.alpha, "Quantum yield of electron transport")
      ->capture_default_str();
  synth_cmd->add_option("--theta", so.group_params.theta, "Curvature of the light response")->capture_default_str();
  synth_cmd->add_option("--light-type", so.light_type, "Light response used to generate")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();
  synth_cmd->add_option("--temp-type", so.temp_type, "Temperature response used to generate")
      ->check(CLI::Range(0, 2))
      ->capture_default_str();

  PreprocessOptions po;
  auto* pre_cmd = app.add_subcommand("preprocess", "Clean curves and write them back as CSV");
  pre_cmd->add_option("input", po.input, "Input CSV")->required();
  pre_cmd->add_option("-o,--output", po.output, "Output CSV")->required();
  add_preprocess_flags(pre_cmd, po.pre);
  add_kind_flags(pre_cmd, po.kinds);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    err << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (fit_cmd->parsed()) return run_fit(fo, global, out, err);
    if (synth_cmd->parsed()) return run_synth(so, global, out, err);
    return run_preprocess(po, global, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace fvcb::cli
