#include "fvcbfit/gradient.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "fvcbfit/detail/loss_eval.hpp"
#include "fvcbfit/dual.hpp"
#include "fvcbfit/error.hpp"
#include "fvcbfit/model.hpp"

namespace fvcb {

std::optional<double> GradientVector::find(ParamId id, std::size_t block) const {
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].id == id && slots[i].block == block) return values[i];
  }
  return std::nullopt;
}

namespace {

struct CurveContribution {
  double sse = 0.0;
  double p_cjp = 0.0, p_c_gt_j = 0.0, p_c_lt_j = 0.0, p_j_lt_p = 0.0;
  std::array<double, kNumParamIds> d_sse{};
  std::array<double, kNumParamIds> d_pen{};
};

// Local (per-curve) derivative slots: the fitted parameter ids, compacted.
struct LocalMap {
  std::array<int, kNumParamIds> local_of{};  // -1 when not fitted
  std::array<ParamId, kNumParamIds> id_of{};
  int count = 0;
};

LocalMap make_local_map(const ParamLayout& layout) {
  LocalMap map;
  map.local_of.fill(-1);
  for (int p = 0; p < kNumParamIds; ++p) {
    if (!layout.fitted(static_cast<ParamId>(p))) continue;
    map.local_of[p] = map.count;
    map.id_of[map.count] = static_cast<ParamId>(p);
    ++map.count;
  }
  return map;
}

template <int N>
Dual<N> seed(double v, ParamId id, const LocalMap& map) {
  const int local = map.local_of[static_cast<int>(id)];
  return local >= 0 ? Dual<N>::variable(v, local) : Dual<N>(v);
}

template <int N>
CurveContribution curve_contribution(const ResponseCurve& curve, const MainParams& m, const GroupParams& g,
                                     const FvCBConstants& constants, const ModelOptions& opt,
                                     const PenaltyConfig& pen, const LocalMap& map, bool detach) {
  using D = Dual<N>;
  detail::MainValues<D> mv{seed<N>(m.vcmax25, ParamId::kVcmax25, map), seed<N>(m.jmax25, ParamId::kJmax25, map),
                           seed<N>(m.tpu25, ParamId::kTpu25, map), seed<N>(m.rd25, ParamId::kRd25, map)};
  detail::GroupValues<D> gv{seed<N>(g.dha_vcmax, ParamId::kDhaVcmax, map),
                            seed<N>(g.dha_jmax, ParamId::kDhaJmax, map),
                            seed<N>(g.dha_tpu, ParamId::kDhaTpu, map),
                            seed<N>(g.topt_vcmax, ParamId::kToptVcmax, map),
                            seed<N>(g.topt_jmax, ParamId::kToptJmax, map),
                            seed<N>(g.topt_tpu, ParamId::kToptTpu, map),
                            seed<N>(g.alpha, ParamId::kAlpha, map),
                            seed<N>(g.theta, ParamId::kTheta, map),
                            seed<N>(g.alpha_g_raw, ParamId::kAlphaGRaw, map),
                            seed<N>(g.gm, ParamId::kGm, map),
                            seed<N>(g.kc25, ParamId::kKc25, map),
                            seed<N>(g.ko25, ParamId::kKo25, map),
                            seed<N>(g.gamma25, ParamId::kGamma25, map)};
  const auto terms = detail::curve_terms<D>(curve, mv, gv, constants, opt, pen, detach);
  const D pen_sum = terms.penalties();
  CurveContribution out;
  out.sse = terms.sse.v;
  out.p_cjp = terms.p_cjp.v;
  out.p_c_gt_j = terms.p_c_gt_j.v;
  out.p_c_lt_j = terms.p_c_lt_j.v;
  out.p_j_lt_p = terms.p_j_lt_p.v;
  for (int i = 0; i < map.count; ++i) {
    out.d_sse[i] = terms.sse.d[i];
    out.d_pen[i] = pen_sum.d[i];
  }
  return out;
}

CurveContribution dispatch(const ResponseCurve& curve, const MainParams& m, const GroupParams& g,
                           const FvCBConstants& constants, const ModelOptions& opt, const PenaltyConfig& pen,
                           const LocalMap& map, bool detach) {
  if (map.count <= 5) return curve_contribution<5>(curve, m, g, constants, opt, pen, map, detach);
  if (map.count <= 8) return curve_contribution<8>(curve, m, g, constants, opt, pen, map, detach);
  if (map.count <= 12) return curve_contribution<12>(curve, m, g, constants, opt, pen, map, detach);
  return curve_contribution<kNumParamIds>(curve, m, g, constants, opt, pen, map, detach);
}

}  // namespace

LossAndGradient loss_gradient(const Dataset& dataset, const ParameterState& state, const FitConfig& config) {
  const ParamLayout layout(dataset, state, config);
  return loss_gradient(dataset, state, config, layout);
}

LossAndGradient loss_gradient(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                              const ParamLayout& layout, GradientMode mode) {
  const bool detach = mode == GradientMode::kDetachTpuTarget;
  const std::size_t n_points = dataset.total_points();
  if (n_points == 0) throw Error(ErrorCode::kEmptyCurve, "dataset has no points");
  const LocalMap map = make_local_map(layout);
  const std::size_t n_curves = dataset.curves.size();
  std::vector<CurveContribution> parts(n_curves);

  const auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t c = begin; c < end; ++c) {
      const auto& curve = dataset.curves[c];
      parts[c] = dispatch(curve, state.main_of(c), state.group_of(c), state.constants,
                          model_options(config, curve), config.penalties, map, detach);
    }
  };

  const std::size_t jobs = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.jobs, 1)), n_curves);
  if (jobs <= 1) {
    work(0, n_curves);
  } else {
    std::vector<std::exception_ptr> errors(jobs);
    std::vector<std::thread> threads;
    const std::size_t chunk = (n_curves + jobs - 1) / jobs;
    for (std::size_t t = 0; t < jobs; ++t) {
      const std::size_t begin = t * chunk, end = std::min(n_curves, begin + chunk);
      threads.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  LossAndGradient out;
  out.grad.slots = layout.slots();
  out.grad.values.assign(layout.size(), 0.0);
  auto& loss = out.loss;
  double sse = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n_points);
  for (std::size_t c = 0; c < n_curves; ++c) {
    const auto& part = parts[c];
    sse += part.sse;
    loss.p_cjp += part.p_cjp;
    loss.p_c_gt_j += part.p_c_gt_j;
    loss.p_c_lt_j += part.p_c_lt_j;
    loss.p_j_lt_p += part.p_j_lt_p;
    for (int i = 0; i < map.count; ++i) {
      const ParamId id = map.id_of[i];
      const std::size_t block = is_main_param(id) ? state.curve_main[c] : state.curve_group[c];
      const long idx = layout.index(id, block);
      if (idx < 0) continue;
      out.grad.values[static_cast<std::size_t>(idx)] += part.d_sse[i] * inv_n + part.d_pen[i];
    }
  }
  loss.mse = sse / static_cast<double>(n_points);
  const auto global = detail::global_terms(dataset, state, config, layout, &out.grad.values);
  loss.p_corr = global.p_corr;
  loss.p_nonneg = global.p_nonneg;
  loss.degenerate_correlation_groups = global.degenerate_groups;
  loss.total = loss.mse + loss.penalty_sum();

  if (!std::isfinite(loss.total)) {
    throw Error(ErrorCode::kNonFinite, "objective is not finite");
  }
  for (std::size_t i = 0; i < out.grad.values.size(); ++i) {
    if (!std::isfinite(out.grad.values[i])) {
      const auto& slot = out.grad.slots[i];
      throw Error(ErrorCode::kNonFinite, "non-finite derivative for " + std::string(param_name(slot.id)) +
                                             " (block " + std::to_string(slot.block) + ")");
    }
  }
  return out;
}

}  // namespace fvcb
