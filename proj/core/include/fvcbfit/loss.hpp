#pragma once

#include <cstddef>
#include <span>

#include "fvcbfit/dataset.hpp"
#include "fvcbfit/parameters.hpp"

namespace fvcb {

/// Objective split into its terms. Penalties are sums over curves, groups or
/// penalised scalars; `total` adds the enabled ones to the MSE.
struct LossBreakdown {
  double mse = 0.0;
  double p_cjp = 0.0;
  double p_c_gt_j = 0.0;
  double p_c_lt_j = 0.0;
  double p_j_lt_p = 0.0;
  double p_corr = 0.0;
  double p_nonneg = 0.0;
  double total = 0.0;
  // Groups where the Vcmax/Jmax correlation was skipped for zero variance.
  std::size_t degenerate_correlation_groups = 0;

  double penalty_sum() const { return p_cjp + p_c_gt_j + p_c_lt_j + p_j_lt_p + p_corr + p_nonneg; }
};

double mse(std::span<const double> measured, std::span<const double> predicted);

/// Index where the Rubisco- and RuBP-limited rates are closest; ties go to
/// the smallest index.
std::size_t find_jc_index(std::span<const double> ac, std::span<const double> aj);

/// Penalises the TPU-limited rate lying below the c/j transition.
double penalty_cjp(std::span<const double> ac, std::span<const double> aj, std::span<const double> ap);

struct IntersectionPenalties {
  double c_gt_j = 0.0;
  double c_lt_j = 0.0;
};

IntersectionPenalties penalty_intersections(std::span<const double> ac, std::span<const double> aj,
                                            double beta = 8.0);

/// max(0, A_p - A_j) at the last (highest-Ci) element.
double penalty_tpu_transition(std::span<const double> aj, std::span<const double> ap);

/// max(0, floor - r(Vcmax, Jmax)) over the curves of one group. Zero when the
/// group has fewer than `min_curves` curves or either series is constant.
double penalty_vj_correlation(std::span<const double> vcmax, std::span<const double> jmax, double floor = 0.7,
                              std::size_t min_curves = 7);

inline double penalty_nonneg(double k) { return k < 0.0 ? -k : 0.0; }

LossBreakdown total_loss(const Dataset& dataset, const ParameterState& state, const FitConfig& config);

}  // namespace fvcb
