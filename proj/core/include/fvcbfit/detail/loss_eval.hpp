#pragma once

// Per-curve loss terms, generic over double and Dual<N>.

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "fvcbfit/detail/model_eval.hpp"
#include "fvcbfit/loss.hpp"

namespace fvcb::detail {

template <class S>
std::size_t find_jc_index_t(std::span<const S> ac, std::span<const S> aj) {
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < ac.size(); ++k) {
    const double gap = std::abs(value(aj[k]) - value(ac[k]));
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return best;
}

template <class S>
S positive_part(const S& x) {
  return value(x) > 0.0 ? x : S(0.0);
}

template <class S>
S penalty_cjp_at(const S& ac, const S& aj, const S& ap) {
  if (!std::isfinite(value(ap))) return S(0.0);
  const S& upper = value(aj) > value(ac) ? aj : ac;
  return positive_part(upper - ap);
}

template <class S>
void penalty_intersections_t(std::span<const S> ac, std::span<const S> aj, double beta, S& c_gt_j, S& c_lt_j) {
  S sum_c(0.0), sum_j(0.0);
  for (std::size_t k = 0; k < ac.size(); ++k) {
    const double diff = value(ac[k]) - value(aj[k]);
    if (diff > 0.0) {
      sum_c += ac[k] - aj[k];
    } else if (diff < 0.0) {
      sum_j += aj[k] - ac[k];
    }
  }
  c_gt_j = positive_part(beta - sum_c);
  c_lt_j = positive_part(beta - sum_j);
}

// With `detach_target` the RuBP-limited rate acts as a fixed target, so the
// penalty only moves A_p.
template <class S>
S penalty_tpu_at(const S& aj, const S& ap, bool detach_target = false) {
  if (!std::isfinite(value(ap))) return S(0.0);
  return detach_target ? positive_part(ap - S(value(aj))) : positive_part(ap - aj);
}

template <class S>
struct CurveTerms {
  S sse{0.0};
  S p_cjp{0.0};
  S p_c_gt_j{0.0};
  S p_c_lt_j{0.0};
  S p_j_lt_p{0.0};

  S penalties() const { return p_cjp + p_c_gt_j + p_c_lt_j + p_j_lt_p; }
};

template <class S>
CurveTerms<S> curve_terms(const ResponseCurve& curve, const MainValues<S>& m, const GroupValues<S>& g,
                          const FvCBConstants& constants, const ModelOptions& opt, const PenaltyConfig& pen,
                          bool detach_tpu_target = false) {
  const std::size_t n = curve.records.size();
  std::vector<S> ac(n), aj(n), ap(n);
  CurveTerms<S> out;
  std::size_t last = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const auto& rec = curve.records[k];
    auto e = evaluate_point(rec, m, g, constants, opt);
    if (!std::isfinite(value(e.a_hat))) {
      throw Error(ErrorCode::kNonFinite, "non-finite prediction at curve " + std::to_string(curve.curve_id) +
                                             ", Ci = " + std::to_string(rec.ci));
    }
    const S r = rec.a - e.a_hat;
    out.sse += r * r;
    ac[k] = e.ac;
    aj[k] = e.aj;
    ap[k] = e.ap;
    if (rec.ci > curve.records[last].ci) last = k;
  }
  if (!pen.enabled || n == 0) return out;

  const std::span<const S> acs(ac), ajs(aj);
  if (!curve.is_light()) {
    const std::size_t jc = find_jc_index_t(acs, ajs);
    out.p_cjp = penalty_cjp_at(ac[jc], aj[jc], ap[jc]);
  }
  penalty_intersections_t(acs, ajs, pen.beta, out.p_c_gt_j, out.p_c_lt_j);
  if (!curve.is_light() && pen.tpu_transition) out.p_j_lt_p = penalty_tpu_at(aj[last], ap[last], detach_tpu_target);
  return out;
}

}  // namespace fvcb::detail

namespace fvcb::detail {

struct GlobalTerms {
  double p_corr = 0.0;
  double p_nonneg = 0.0;
  std::size_t degenerate_groups = 0;
};

/// Group-level correlation and non-negativity penalties. When `grad` is
/// non-null their derivatives are added into it using `layout`.
GlobalTerms global_terms(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                         const ParamLayout& layout, std::vector<double>* grad);

}  // namespace fvcb::detail
