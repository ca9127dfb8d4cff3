#include "fvcbfit/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fvcbfit/detail/loss_eval.hpp"
#include "fvcbfit/error.hpp"
#include "fvcbfit/metrics.hpp"
#include "fvcbfit/model.hpp"

namespace fvcb {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw Error(ErrorCode::kLengthMismatch, std::string(what) + ": series lengths " + std::to_string(a) +
                                                " and " + std::to_string(b) + " differ");
  }
}

}  // namespace

double mse(std::span<const double> measured, std::span<const double> predicted) {
  require_same_length(measured.size(), predicted.size(), "mse");
  if (measured.empty()) throw Error(ErrorCode::kLengthMismatch, "mse: empty series");
  double sum = 0.0;
  for (std::size_t k = 0; k < measured.size(); ++k) {
    const double r = measured[k] - predicted[k];
    sum += r * r;
  }
  return sum / static_cast<double>(measured.size());
}

std::size_t find_jc_index(std::span<const double> ac, std::span<const double> aj) {
  require_same_length(ac.size(), aj.size(), "find_jc_index");
  return detail::find_jc_index_t(ac, aj);
}

double penalty_cjp(std::span<const double> ac, std::span<const double> aj, std::span<const double> ap) {
  require_same_length(ac.size(), aj.size(), "penalty_cjp");
  require_same_length(ac.size(), ap.size(), "penalty_cjp");
  if (ac.empty()) return 0.0;
  const std::size_t jc = detail::find_jc_index_t(ac, aj);
  return detail::penalty_cjp_at(ac[jc], aj[jc], ap[jc]);
}

IntersectionPenalties penalty_intersections(std::span<const double> ac, std::span<const double> aj, double beta) {
  require_same_length(ac.size(), aj.size(), "penalty_intersections");
  IntersectionPenalties out;
  detail::penalty_intersections_t(ac, aj, beta, out.c_gt_j, out.c_lt_j);
  return out;
}

double penalty_tpu_transition(std::span<const double> aj, std::span<const double> ap) {
  require_same_length(aj.size(), ap.size(), "penalty_tpu_transition");
  if (aj.empty()) return 0.0;
  return detail::penalty_tpu_at(aj.back(), ap.back());
}

double penalty_vj_correlation(std::span<const double> vcmax, std::span<const double> jmax, double floor,
                              std::size_t min_curves) {
  require_same_length(vcmax.size(), jmax.size(), "penalty_vj_correlation");
  if (vcmax.size() < std::max<std::size_t>(min_curves, 2)) return 0.0;
  try {
    return std::max(0.0, floor - pearson_r(vcmax, jmax));
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kZeroVariance) return 0.0;
    throw;
  }
}

namespace detail {

GlobalTerms global_terms(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                         const ParamLayout& layout, std::vector<double>* grad) {
  GlobalTerms out;
  const auto& pen = config.penalties;
  if (!pen.enabled) return out;

  const auto add_grad = [&](ParamId id, std::size_t block, double d) {
    if (grad == nullptr) return;
    const long idx = layout.index(id, block);
    if (idx >= 0) (*grad)[static_cast<std::size_t>(idx)] += d;
  };
  const auto nonneg = [&](ParamId id, std::size_t block) {
    if (layout.index(id, block) < 0) return;
    const double k = state.get(id, block);
    if (k < 0.0) {
      out.p_nonneg += -k;
      add_grad(id, block, -1.0);
    }
  };

  if (pen.positive_rd) {
    for (std::size_t b = 0; b < state.main.size(); ++b) nonneg(ParamId::kRd25, b);
  }
  for (std::size_t b = 0; b < state.groups.size(); ++b) {
    for (ParamId id : {ParamId::kDhaVcmax, ParamId::kDhaJmax, ParamId::kDhaTpu, ParamId::kAlpha, ParamId::kTheta}) {
      nonneg(id, b);
    }
  }

  if (pen.vj_correlation && !config.onefit) {
    for (const auto& [group_id, members] : dataset.groups) {
      if (members.size() < pen.min_curves_for_correlation) continue;
      std::vector<double> x, y;
      std::vector<std::size_t> blocks;
      for (std::size_t c : members) {
        blocks.push_back(state.curve_main[c]);
        x.push_back(state.main_of(c).vcmax25);
        y.push_back(state.main_of(c).jmax25);
      }
      const double n = static_cast<double>(x.size());
      double mx = 0.0, my = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
      }
      mx /= n;
      my /= n;
      double sxx = 0.0, syy = 0.0, sxy = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
        sxy += (x[i] - mx) * (y[i] - my);
      }
      if (!(sxx > 0.0) || !(syy > 0.0)) {
        ++out.degenerate_groups;
        continue;
      }
      const double root = std::sqrt(sxx * syy);
      const double r = sxy / root;
      if (r >= pen.correlation_floor) continue;
      out.p_corr += pen.correlation_floor - r;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double dr_dx = (y[i] - my) / root - r * (x[i] - mx) / sxx;
        const double dr_dy = (x[i] - mx) / root - r * (y[i] - my) / syy;
        add_grad(ParamId::kVcmax25, blocks[i], -dr_dx);
        add_grad(ParamId::kJmax25, blocks[i], -dr_dy);
      }
    }
  }
  return out;
}

}  // namespace detail

LossBreakdown total_loss(const Dataset& dataset, const ParameterState& state, const FitConfig& config) {
  LossBreakdown out;
  const std::size_t n = dataset.total_points();
  if (n == 0) throw Error(ErrorCode::kEmptyCurve, "dataset has no points");
  double sse = 0.0;
  for (std::size_t c = 0; c < dataset.curves.size(); ++c) {
    const auto& curve = dataset.curves[c];
    auto terms = detail::curve_terms<double>(curve, detail::constant_main<double>(state.main_of(c)),
                                             detail::constant_group<double>(state.group_of(c)), state.constants,
                                             model_options(config, curve), config.penalties);
    sse += terms.sse;
    out.p_cjp += terms.p_cjp;
    out.p_c_gt_j += terms.p_c_gt_j;
    out.p_c_lt_j += terms.p_c_lt_j;
    out.p_j_lt_p += terms.p_j_lt_p;
  }
  out.mse = sse / static_cast<double>(n);
  const ParamLayout layout(dataset, state, config);
  const auto global = detail::global_terms(dataset, state, config, layout, nullptr);
  out.p_corr = global.p_corr;
  out.p_nonneg = global.p_nonneg;
  out.degenerate_correlation_groups = global.degenerate_groups;
  out.total = out.mse + out.penalty_sum();
  return out;
}

}  // namespace fvcb
