#include "fvcbfit/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fvcbfit/error.hpp"
#include "fvcbfit/gradient.hpp"

namespace fvcb {

AdamState::AdamState(std::size_t n, const AdamConfig& config)
    : m(n, 0.0), v(n, 0.0), lr(config.lr), beta1(config.beta1), beta2(config.beta2), eps(config.eps) {}

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad) {
  if (params.size() != grad.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
    throw Error(ErrorCode::kLengthMismatch, "adam_step: parameter, gradient and moment sizes differ");
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw Error(ErrorCode::kNonFinite, "adam_step: non-finite gradient");
  }
  ++state.t;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

ParameterState init_parameters(const Dataset& dataset, const FitConfig& config) {
  ParameterState state;
  state.constants = config.constants;
  const std::size_t n_curves = dataset.curves.size();
  state.curve_main.assign(n_curves, 0);
  state.curve_group.assign(n_curves, 0);
  std::size_t g = 0;
  for (const auto& [group_id, members] : dataset.groups) {
    state.group_ids.push_back(group_id);
    state.groups.push_back(config.initial_group);
    if (config.onefit) state.main.push_back(config.initial_main);
    for (std::size_t c : members) {
      state.curve_group[c] = g;
      if (config.onefit) state.curve_main[c] = g;
    }
    ++g;
  }
  if (!config.onefit) {
    state.main.assign(n_curves, config.initial_main);
    for (std::size_t c = 0; c < n_curves; ++c) state.curve_main[c] = c;
  }
  return state;
}

DivergenceError::DivergenceError(const std::string& message, ParameterState last_good, int iteration)
    : Error(ErrorCode::kDivergence, message), last_good_(std::move(last_good)), iteration_(iteration) {}

namespace {

constexpr double kMinPositive = 1e-6;
constexpr double kThetaMin = 1e-4;

// Lowest gm keeping Ci - A/gm positive at every point of each group.
std::vector<double> gm_floors(const Dataset& dataset, const ParameterState& state) {
  std::vector<double> floors(state.groups.size(), kMinPositive);
  for (std::size_t c = 0; c < dataset.curves.size(); ++c) {
    auto& f = floors[state.curve_group[c]];
    for (const auto& r : dataset.curves[c].records) {
      if (r.a > 0.0) f = std::max(f, 1.01 * r.a / r.ci);
    }
  }
  return floors;
}

// Keeps the iterate inside the model's domain.
void project(ParameterState& state, const ParamLayout& layout, const FitConfig& config,
             const std::vector<double>& gm_floor) {
  const auto& k = state.constants;
  const bool rd_floor = config.penalties.enabled && config.penalties.positive_rd;
  for (auto& m : state.main) {
    m.jmax25 = std::max(m.jmax25, kMinPositive);
    if (rd_floor) m.rd25 = std::max(m.rd25, 0.0);
  }
  for (std::size_t b = 0; b < state.groups.size(); ++b) {
    auto& g = state.groups[b];
    if (config.temp == TempResponse::kPeaked) {
      const auto guard = [](double& dha, double dhd) { dha = std::clamp(dha, 1e-3, dhd - 1.0); };
      if (layout.fitted(ParamId::kDhaVcmax)) guard(g.dha_vcmax, k.dhd_vcmax);
      if (layout.fitted(ParamId::kDhaJmax)) guard(g.dha_jmax, k.dhd_jmax);
      if (layout.fitted(ParamId::kDhaTpu)) guard(g.dha_tpu, k.dhd_tpu);
    }
    if (layout.fitted(ParamId::kAlpha)) g.alpha = std::max(g.alpha, 0.0);
    if (layout.fitted(ParamId::kTheta)) g.theta = std::clamp(g.theta, kThetaMin, 1.0);
    if (layout.fitted(ParamId::kGm)) g.gm = std::max(g.gm, gm_floor[b]);
    if (layout.fitted(ParamId::kKc25)) g.kc25 = std::max(g.kc25, kMinPositive);
    if (layout.fitted(ParamId::kKo25)) g.ko25 = std::max(g.ko25, kMinPositive);
    if (layout.fitted(ParamId::kGamma25)) g.gamma25 = std::max(g.gamma25, kMinPositive);
  }
}

void check_dataset(const Dataset& dataset) {
  if (dataset.curves.empty()) throw Error(ErrorCode::kEmptyCurve, "dataset has no curves");
  for (const auto& c : dataset.curves) {
    if (c.records.size() < 5) {
      throw Error(ErrorCode::kTooFewPoints, "curve " + std::to_string(c.curve_id) + " has " +
                                                std::to_string(c.records.size()) + " points; fitting needs 5");
    }
  }
}

}  // namespace

FitResult summarize(const Dataset& dataset, const ParameterState& state, const FitConfig& config) {
  FitResult out;
  out.params = state;
  const ParamLayout layout(dataset, state, config);
  for (int p = 0; p < kNumParamIds; ++p) out.fitted[p] = layout.fitted(static_cast<ParamId>(p));
  out.final_loss = total_loss(dataset, state, config);

  double rmse_sum = 0.0, r2_sum = 0.0;
  std::size_t r2_count = 0;
  for (std::size_t c = 0; c < dataset.curves.size(); ++c) {
    const auto& curve = dataset.curves[c];
    const auto opt = model_options(config, curve);
    std::vector<double> measured, predicted;
    std::size_t last = 0;
    double gap = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < curve.records.size(); ++k) {
      const auto& rec = curve.records[k];
      const auto p = net_assimilation(rec, state.main_of(c), state.group_of(c), state.constants, opt);
      measured.push_back(rec.a);
      predicted.push_back(p.a);
      out.predictions.push_back({curve.curve_id, rec.ci, rec.a, p.a, p.state});
      if (rec.ci > curve.records[last].ci) last = k;
    }
    CurveFit cf;
    cf.curve_id = curve.curve_id;
    cf.fitting_group = curve.fitting_group;
    cf.kind = curve.kind;
    cf.params = state.main_of(c);
    cf.metrics = curve_metrics(measured, predicted);
    if (!curve.is_light()) {
      const auto p = net_assimilation(curve.records[last], state.main_of(c), state.group_of(c), state.constants, opt);
      if (std::isfinite(p.ap)) gap = p.ap - p.aj;
    }
    cf.tpu_gap = gap;
    cf.tpu_stage = std::isfinite(gap) && gap < -kTpuStageMargin;
    rmse_sum += cf.metrics.rmse;
    if (std::isfinite(cf.metrics.r2)) {
      r2_sum += cf.metrics.r2;
      ++r2_count;
    }
    out.curves.push_back(cf);
  }
  for (std::size_t b = 0; b < state.groups.size(); ++b) out.groups.push_back({state.group_ids[b], state.groups[b]});
  out.mean_rmse = dataset.curves.empty() ? 0.0 : rmse_sum / static_cast<double>(dataset.curves.size());
  out.mean_r2 = r2_count == 0 ? std::numeric_limits<double>::quiet_NaN() : r2_sum / static_cast<double>(r2_count);
  return out;
}

FitResult fit(const Dataset& dataset, const FitConfig& config) {
  config.validate();
  check_dataset(dataset);

  ParameterState state = init_parameters(dataset, config);
  const ParamLayout layout(dataset, state, config);
  const auto gm_floor = gm_floors(dataset, state);
  project(state, layout, config, gm_floor);
  std::vector<double> x = layout.gather(state);

  AdamState adam(x.size(), config.adam);
  std::vector<double> best_x = x;
  double best_loss = std::numeric_limits<double>::infinity();
  double initial_loss = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<int, double>> history;
  double prev_loss = std::numeric_limits<double>::quiet_NaN();
  int stable_iters = 0;
  int iter = 0;

  const auto evaluate = [&](int at) {
    try {
      return loss_gradient(dataset, state, config, layout,
                           config.penalties.detach_tpu_target ? GradientMode::kDetachTpuTarget
                                                              : GradientMode::kExact);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNonFinite && e.code() != ErrorCode::kNonPositiveC &&
          e.code() != ErrorCode::kDomainError) {
        throw;
      }
      ParameterState last_good = state;
      layout.scatter(best_x, last_good);
      throw DivergenceError(std::string("fit diverged at iteration ") + std::to_string(at) + ": " + e.what(),
                            std::move(last_good), at);
    }
  };

  for (; iter < config.adam.max_iter; ++iter) {
    auto lg = evaluate(iter);
    const double loss = lg.loss.total;
    if (iter == 0) initial_loss = loss;
    if (loss < best_loss) {
      best_loss = loss;
      best_x = x;
    }
    if (iter % config.history_stride == 0) history.emplace_back(iter, loss);
    if (config.on_progress && config.progress_interval > 0 && iter % config.progress_interval == 0) {
      config.on_progress(iter, loss);
    }
    if (config.adam.early_stop && iter > 0) {
      const double rel = std::abs(loss - prev_loss) / std::max(std::abs(prev_loss), 1e-300);
      stable_iters = rel < config.adam.early_stop_rel_tol ? stable_iters + 1 : 0;
      if (stable_iters >= config.adam.early_stop_window) break;
    }
    prev_loss = loss;

    adam_step(adam, x, lg.grad.values);
    layout.scatter(x, state);
    project(state, layout, config, gm_floor);
    x = layout.gather(state);
  }

  // The iterate after the last step has not been scored yet.
  const double final_loss = evaluate(iter).loss.total;
  if (iter == 0) initial_loss = final_loss;
  if (final_loss < best_loss) {
    best_loss = final_loss;
    best_x = x;
  }
  history.emplace_back(iter, final_loss);

  layout.scatter(best_x, state);

  FitResult out = summarize(dataset, state, config);
  out.initial_loss = initial_loss;
  out.loss_history = std::move(history);
  out.iterations_run = iter;
  return out;
}

}  // namespace fvcb
