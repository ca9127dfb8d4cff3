#include "fvcbfit/parameters.hpp"

#include <cmath>
#include <string>

#include "fvcbfit/error.hpp"

namespace fvcb {

double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double logit(double p) { return std::log(p / (1.0 - p)); }

double GroupParams::alpha_g() const { return logistic(alpha_g_raw); }

std::string_view param_name(ParamId id) {
  switch (id) {
    case ParamId::kVcmax25: return "Vcmax25";
    case ParamId::kJmax25: return "Jmax25";
    case ParamId::kTpu25: return "TPU25";
    case ParamId::kRd25: return "Rd25";
    case ParamId::kDhaVcmax: return "dHa_Vcmax";
    case ParamId::kDhaJmax: return "dHa_Jmax";
    case ParamId::kDhaTpu: return "dHa_TPU";
    case ParamId::kToptVcmax: return "Topt_Vcmax";
    case ParamId::kToptJmax: return "Topt_Jmax";
    case ParamId::kToptTpu: return "Topt_TPU";
    case ParamId::kAlpha: return "alpha";
    case ParamId::kTheta: return "theta";
    case ParamId::kAlphaGRaw: return "alphaG_raw";
    case ParamId::kGm: return "gm";
    case ParamId::kKc25: return "Kc25";
    case ParamId::kKo25: return "Ko25";
    case ParamId::kGamma25: return "Gamma25";
  }
  return "?";
}

void FitConfig::validate() const {
  const int lt = static_cast<int>(light);
  const int tt = static_cast<int>(temp);
  if (lt < 0 || lt > 2) throw Error(ErrorCode::kInvalidConfig, "light response type must be 0, 1 or 2");
  if (tt < 0 || tt > 2) throw Error(ErrorCode::kInvalidConfig, "temperature response type must be 0, 1 or 2");
  if (!(adam.lr > 0.0)) throw Error(ErrorCode::kInvalidConfig, "learning rate must be positive");
  if (adam.max_iter < 0) throw Error(ErrorCode::kInvalidConfig, "max_iter must be >= 0");
  if (!(adam.beta1 >= 0.0 && adam.beta1 < 1.0) || !(adam.beta2 >= 0.0 && adam.beta2 < 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "Adam betas must lie in [0, 1)");
  }
  if (!(adam.eps > 0.0)) throw Error(ErrorCode::kInvalidConfig, "Adam epsilon must be positive");
  if (!(penalties.beta > 0.0)) throw Error(ErrorCode::kInvalidConfig, "beta must be positive");
  if (jobs < 1) throw Error(ErrorCode::kInvalidConfig, "jobs must be >= 1");
  if (history_stride < 1) throw Error(ErrorCode::kInvalidConfig, "history_stride must be >= 1");
}

double ParameterState::get(ParamId id, std::size_t block) const {
  if (is_main_param(id)) {
    const auto& m = main.at(block);
    switch (id) {
      case ParamId::kVcmax25: return m.vcmax25;
      case ParamId::kJmax25: return m.jmax25;
      case ParamId::kTpu25: return m.tpu25;
      default: return m.rd25;
    }
  }
  const auto& g = groups.at(block);
  switch (id) {
    case ParamId::kDhaVcmax: return g.dha_vcmax;
    case ParamId::kDhaJmax: return g.dha_jmax;
    case ParamId::kDhaTpu: return g.dha_tpu;
    case ParamId::kToptVcmax: return g.topt_vcmax;
    case ParamId::kToptJmax: return g.topt_jmax;
    case ParamId::kToptTpu: return g.topt_tpu;
    case ParamId::kAlpha: return g.alpha;
    case ParamId::kTheta: return g.theta;
    case ParamId::kAlphaGRaw: return g.alpha_g_raw;
    case ParamId::kGm: return g.gm;
    case ParamId::kKc25: return g.kc25;
    case ParamId::kKo25: return g.ko25;
    default: return g.gamma25;
  }
}

void ParameterState::set(ParamId id, std::size_t block, double value) {
  if (is_main_param(id)) {
    auto& m = main.at(block);
    switch (id) {
      case ParamId::kVcmax25: m.vcmax25 = value; return;
      case ParamId::kJmax25: m.jmax25 = value; return;
      case ParamId::kTpu25: m.tpu25 = value; return;
      default: m.rd25 = value; return;
    }
  }
  auto& g = groups.at(block);
  switch (id) {
    case ParamId::kDhaVcmax: g.dha_vcmax = value; return;
    case ParamId::kDhaJmax: g.dha_jmax = value; return;
    case ParamId::kDhaTpu: g.dha_tpu = value; return;
    case ParamId::kToptVcmax: g.topt_vcmax = value; return;
    case ParamId::kToptJmax: g.topt_jmax = value; return;
    case ParamId::kToptTpu: g.topt_tpu = value; return;
    case ParamId::kAlpha: g.alpha = value; return;
    case ParamId::kTheta: g.theta = value; return;
    case ParamId::kAlphaGRaw: g.alpha_g_raw = value; return;
    case ParamId::kGm: g.gm = value; return;
    case ParamId::kKc25: g.kc25 = value; return;
    case ParamId::kKo25: g.ko25 = value; return;
    default: g.gamma25 = value; return;
  }
}

namespace {
constexpr int kNumGroupParams = kNumParamIds - kNumMainParams;
}

ParamLayout::ParamLayout(const Dataset& dataset, const ParameterState& state, const FitConfig& config) {
  const bool has_co2 = !dataset.all_light();
  const bool temp_on = config.temp != TempResponse::kNone;
  const bool peaked = config.temp == TempResponse::kPeaked;
  auto& f = fitted_;
  f[static_cast<int>(ParamId::kVcmax25)] = true;
  f[static_cast<int>(ParamId::kJmax25)] = true;
  f[static_cast<int>(ParamId::kTpu25)] = has_co2;
  f[static_cast<int>(ParamId::kRd25)] = true;
  f[static_cast<int>(ParamId::kDhaVcmax)] = temp_on;
  f[static_cast<int>(ParamId::kDhaJmax)] = temp_on;
  f[static_cast<int>(ParamId::kDhaTpu)] = temp_on && has_co2;
  f[static_cast<int>(ParamId::kToptVcmax)] = peaked;
  f[static_cast<int>(ParamId::kToptJmax)] = peaked;
  f[static_cast<int>(ParamId::kToptTpu)] = peaked && has_co2;
  f[static_cast<int>(ParamId::kAlpha)] = config.light != LightResponse::kConstant;
  f[static_cast<int>(ParamId::kTheta)] = config.light == LightResponse::kNonRectangular;
  f[static_cast<int>(ParamId::kAlphaGRaw)] = has_co2;
  f[static_cast<int>(ParamId::kGm)] = config.fit_gm;
  f[static_cast<int>(ParamId::kKc25)] = config.fit_kinetics;
  f[static_cast<int>(ParamId::kKo25)] = config.fit_kinetics;
  f[static_cast<int>(ParamId::kGamma25)] = config.fit_kinetics;

  n_main_blocks_ = state.main.size();
  main_index_.assign(n_main_blocks_ * kNumMainParams, -1);
  group_index_.assign(state.groups.size() * kNumGroupParams, -1);
  for (std::size_t b = 0; b < n_main_blocks_; ++b) {
    for (int p = 0; p < kNumMainParams; ++p) {
      if (!f[p]) continue;
      main_index_[b * kNumMainParams + p] = static_cast<long>(slots_.size());
      slots_.push_back({static_cast<ParamId>(p), b});
    }
  }
  for (std::size_t b = 0; b < state.groups.size(); ++b) {
    for (int p = kNumMainParams; p < kNumParamIds; ++p) {
      if (!f[p]) continue;
      group_index_[b * kNumGroupParams + (p - kNumMainParams)] = static_cast<long>(slots_.size());
      slots_.push_back({static_cast<ParamId>(p), b});
    }
  }
}

long ParamLayout::index(ParamId id, std::size_t block) const {
  const int p = static_cast<int>(id);
  if (is_main_param(id)) {
    if (block >= n_main_blocks_) return -1;
    return main_index_[block * kNumMainParams + p];
  }
  const std::size_t k = block * kNumGroupParams + (p - kNumMainParams);
  return k < group_index_.size() ? group_index_[k] : -1;
}

std::vector<double> ParamLayout::gather(const ParameterState& state) const {
  std::vector<double> values(slots_.size());
  for (std::size_t i = 0; i < slots_.size(); ++i) values[i] = state.get(slots_[i].id, slots_[i].block);
  return values;
}

void ParamLayout::scatter(std::span<const double> values, ParameterState& state) const {
  if (values.size() != slots_.size()) {
    throw Error(ErrorCode::kLengthMismatch, "parameter vector has " + std::to_string(values.size()) +
                                                " entries, layout expects " + std::to_string(slots_.size()));
  }
  for (std::size_t i = 0; i < slots_.size(); ++i) state.set(slots_[i].id, slots_[i].block, values[i]);
}

}  // namespace fvcb
