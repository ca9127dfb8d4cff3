#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "fvcbfit/dataset.hpp"

namespace fvcb {

/// Fixed constants of the model. Energies in kJ/mol, R in kJ/mol/K.
struct FvCBConstants {
  double o2 = 210.0;  // mmol/mol
  double r_gas = 0.008314;
  double dha_rd = 46.39;
  double dha_kc = 79.43;
  double dha_ko = 36.38;
  double dha_gamma = 37.83;
  double dhd_vcmax = 200.0;
  double dhd_jmax = 200.0;
  double dhd_tpu = 201.8;
};

/// Per-curve rates at 25 °C (µmol/m²/s).
struct MainParams {
  double vcmax25 = 100.0;
  double jmax25 = 200.0;
  double tpu25 = 25.0;
  double rd25 = 1.5;
};

/// Logistic input that represents α_g = 0 for practical purposes.
inline constexpr double kAlphaGRawDefault = -12.0;

/// Parameters shared by every curve of a fitting group.
struct GroupParams {
  double dha_vcmax = 65.33;
  double dha_jmax = 43.9;
  double dha_tpu = 53.1;
  double topt_vcmax = 311.0;
  double topt_jmax = 311.0;
  double topt_tpu = 306.0;
  double alpha = 0.5;
  double theta = 0.7;
  double alpha_g_raw = kAlphaGRawDefault;
  double gm = 10.0;       // mol/m²/s
  double kc25 = 404.9;    // µmol/mol
  double ko25 = 278.4;    // mmol/mol
  double gamma25 = 42.75; // µmol/mol

  double alpha_g() const;
};

double logistic(double x);
double logit(double p);

enum class LightResponse : int { kConstant = 0, kRectangular = 1, kNonRectangular = 2 };
enum class TempResponse : int { kNone = 0, kArrhenius = 1, kPeaked = 2 };

/// Identifiers of every parameter that may be fitted. The first four live in
/// per-curve (or per-group under onefit) main blocks, the rest in group blocks.
enum class ParamId : int {
  kVcmax25 = 0,
  kJmax25,
  kTpu25,
  kRd25,
  kDhaVcmax,
  kDhaJmax,
  kDhaTpu,
  kToptVcmax,
  kToptJmax,
  kToptTpu,
  kAlpha,
  kTheta,
  kAlphaGRaw,
  kGm,
  kKc25,
  kKo25,
  kGamma25,
};
inline constexpr int kNumParamIds = 17;
inline constexpr int kNumMainParams = 4;

std::string_view param_name(ParamId id);
inline bool is_main_param(ParamId id) { return static_cast<int>(id) < kNumMainParams; }

struct PenaltyConfig {
  bool enabled = true;  // master switch; off leaves the plain MSE
  double beta = 8.0;
  bool tpu_transition = true;
  bool vj_correlation = false;
  bool positive_rd = true;
  // fit() treats A_j in the TPU-transition penalty as a constant target.
  bool detach_tpu_target = true;
  std::size_t min_curves_for_correlation = 7;
  double correlation_floor = 0.7;
};

struct AdamConfig {
  double lr = 0.08;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  int max_iter = 20000;
  bool early_stop = false;
  double early_stop_rel_tol = 1e-7;
  int early_stop_window = 500;
};

struct FitConfig {
  LightResponse light = LightResponse::kConstant;
  TempResponse temp = TempResponse::kNone;
  bool onefit = false;
  bool fit_gm = false;
  bool fit_kinetics = false;
  PenaltyConfig penalties;
  AdamConfig adam;
  FvCBConstants constants;
  MainParams initial_main;
  GroupParams initial_group;
  int jobs = 1;
  int history_stride = 100;
  int progress_interval = 500;
  std::function<void(int iteration, double loss)> on_progress;

  void validate() const;
};

/// Values of all parameters (fitted or fixed) for a dataset.
struct ParameterState {
  std::vector<MainParams> main;
  std::vector<GroupParams> groups;
  std::vector<std::size_t> curve_main;   // curve position -> main block
  std::vector<std::size_t> curve_group;  // curve position -> group block
  std::vector<int> group_ids;            // group block -> FittingGroup id
  FvCBConstants constants;

  const MainParams& main_of(std::size_t curve) const { return main[curve_main[curve]]; }
  const GroupParams& group_of(std::size_t curve) const { return groups[curve_group[curve]]; }

  double get(ParamId id, std::size_t block) const;
  void set(ParamId id, std::size_t block, double value);
};

/// One fitted scalar: a parameter id plus the main or group block it lives in.
struct ParamSlot {
  ParamId id;
  std::size_t block;
  bool operator==(const ParamSlot&) const = default;
};

/// The fitted subset of a ParameterState under a configuration.
class ParamLayout {
 public:
  ParamLayout(const Dataset& dataset, const ParameterState& state, const FitConfig& config);

  std::size_t size() const { return slots_.size(); }
  const std::vector<ParamSlot>& slots() const { return slots_; }
  bool fitted(ParamId id) const { return fitted_[static_cast<int>(id)]; }

  /// Flat index of (id, block), or -1 when not fitted.
  long index(ParamId id, std::size_t block) const;

  std::vector<double> gather(const ParameterState& state) const;
  void scatter(std::span<const double> values, ParameterState& state) const;

 private:
  std::vector<ParamSlot> slots_;
  std::array<bool, kNumParamIds> fitted_{};
  std::size_t n_main_blocks_ = 0;
  std::vector<long> main_index_;   // [block * 4 + id]
  std::vector<long> group_index_;  // [block * 13 + (id - 4)]
};

}  // namespace fvcb
