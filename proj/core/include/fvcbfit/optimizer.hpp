#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fvcbfit/dataset.hpp"
#include "fvcbfit/error.hpp"
#include "fvcbfit/loss.hpp"
#include "fvcbfit/metrics.hpp"
#include "fvcbfit/model.hpp"
#include "fvcbfit/parameters.hpp"

namespace fvcb {

/// Moment estimates for Adam, one entry per fitted parameter.
struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long t = 0;
  double lr = 0.08;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  AdamState() = default;
  AdamState(std::size_t n, const AdamConfig& config);
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad);

/// Default starting values. Main blocks are per curve, or one per fitting
/// group under onefit.
ParameterState init_parameters(const Dataset& dataset, const FitConfig& config);

struct PointPrediction {
  int curve_id = 0;
  double ci = 0.0;
  double a_measured = 0.0;
  double a_predicted = 0.0;
  LimitingState state = LimitingState::kRubisco;
};

struct CurveFit {
  int curve_id = 0;
  int fitting_group = 0;
  CurveKind kind = CurveKind::kCO2Response;
  MainParams params;
  CurveMetrics metrics;
  double tpu_gap = 0.0;    // A_p - A_j at the highest Ci; NaN for light curves
  bool tpu_stage = false;  // tpu_gap < -0.5
};

struct GroupFit {
  int fitting_group = 0;
  GroupParams params;
};

struct FitResult {
  ParameterState params;
  std::array<bool, kNumParamIds> fitted{};
  std::vector<CurveFit> curves;
  std::vector<GroupFit> groups;
  std::vector<PointPrediction> predictions;
  std::vector<std::pair<int, double>> loss_history;  // (iteration, total loss)
  double initial_loss = 0.0;
  LossBreakdown final_loss;
  int iterations_run = 0;
  double mean_rmse = 0.0;
  double mean_r2 = 0.0;
};

/// Thrown when the objective stops being finite; carries the last parameters
/// that produced a finite loss.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, ParameterState last_good, int iteration);

  const ParameterState& last_good() const { return last_good_; }
  int iteration() const { return iteration_; }

 private:
  ParameterState last_good_;
  int iteration_;
};

inline constexpr double kTpuStageMargin = 0.5;

/// Fits all curves of `dataset` jointly with Adam. The parameters with the
/// lowest objective seen during the run are returned.
FitResult fit(const Dataset& dataset, const FitConfig& config);

/// Predictions, metrics and TPU flags for a given parameter state.
FitResult summarize(const Dataset& dataset, const ParameterState& state, const FitConfig& config);

}  // namespace fvcb
