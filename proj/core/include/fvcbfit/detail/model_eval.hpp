#pragma once

// Scalar-generic forward model shared by value and derivative evaluation.
// `S` is double or Dual<N>.

#include <cmath>
#include <limits>
#include <string>

#include "fvcbfit/dual.hpp"
#include "fvcbfit/error.hpp"
#include "fvcbfit/model.hpp"

namespace fvcb::detail {

template <class S>
struct MainValues {
  S vcmax25, jmax25, tpu25, rd25;
};

template <class S>
struct GroupValues {
  S dha_vcmax, dha_jmax, dha_tpu;
  S topt_vcmax, topt_jmax, topt_tpu;
  S alpha, theta, alpha_g_raw, gm;
  S kc25, ko25, gamma25;
};

template <class S>
MainValues<S> constant_main(const MainParams& m) {
  return {S(m.vcmax25), S(m.jmax25), S(m.tpu25), S(m.rd25)};
}

template <class S>
GroupValues<S> constant_group(const GroupParams& g) {
  return {S(g.dha_vcmax), S(g.dha_jmax), S(g.dha_tpu), S(g.topt_vcmax), S(g.topt_jmax),
          S(g.topt_tpu),  S(g.alpha),    S(g.theta),   S(g.alpha_g_raw), S(g.gm),
          S(g.kc25),      S(g.ko25),     S(g.gamma25)};
}

template <class S>
S arrhenius_t(const S& k25, const S& dha, double tleaf_k, double r_gas) {
  using std::exp;
  return k25 * exp(dha * ((1.0 / kReferenceTempK - 1.0 / tleaf_k) / r_gas));
}

template <class S>
S deactivation_t(const S& dha, double dhd, const S& topt, double t, double r_gas) {
  using std::exp;
  using std::log;
  return 1.0 + exp((dhd / r_gas) * (1.0 / topt - 1.0 / t) - log(dhd / dha - 1.0));
}

template <class S>
S peaked_arrhenius_t(const S& k25, const S& dha, double dhd, const S& topt, double tleaf_k, double r_gas) {
  if (!(value(dha) > 0.0) || !(dhd > value(dha))) {
    throw Error(ErrorCode::kDomainError, "peaked Arrhenius needs dHd > dHa > 0 (dHa = " +
                                             std::to_string(value(dha)) + ", dHd = " + std::to_string(dhd) + ")");
  }
  return arrhenius_t(k25, dha, tleaf_k, r_gas) * deactivation_t(dha, dhd, topt, kReferenceTempK, r_gas) /
         deactivation_t(dha, dhd, topt, tleaf_k, r_gas);
}

template <class S>
S electron_transport_t(double qin, const S& jmax, const S& alpha, const S& theta, LightResponse type) {
  using std::sqrt;
  switch (type) {
    case LightResponse::kConstant:
      return jmax;
    case LightResponse::kRectangular: {
      const S aq = alpha * qin;
      return aq * jmax / (aq + jmax);
    }
    case LightResponse::kNonRectangular: {
      // Smaller root of θJ² - (αQ + Jmax)J + αQ·Jmax = 0, written as
      // 2p / (x + sqrt(x² - 4θp)) so that θ -> 0 reduces to the rectangular form.
      const S aq = alpha * qin;
      const S x = aq + jmax;
      const S p = aq * jmax;
      S disc = x * x - 4.0 * theta * p;
      if (value(disc) <= 0.0) disc = S(0.0);
      return 2.0 * p / (x + sqrt(disc));
    }
  }
  return jmax;
}

template <class S>
struct PointEval {
  S ac, aj, ap;
  S a_hat;
  LimitingState state = LimitingState::kRubisco;
  bool ap_active = false;  // false when W_p is excluded from the minimum
};

template <class S>
PointEval<S> evaluate_point(const GasExchangeRecord& rec, const MainValues<S>& m, const GroupValues<S>& g,
                            const FvCBConstants& k, const ModelOptions& opt) {
  using std::exp;
  const double t = rec.tleaf_k();
  const bool need_tpu = !opt.exclude_tpu;

  S vcmax(0.0), jmax(0.0), tpu(0.0), rd(0.0);
  switch (opt.temp) {
    case TempResponse::kNone:
      vcmax = m.vcmax25;
      jmax = m.jmax25;
      tpu = m.tpu25;
      rd = m.rd25;
      break;
    case TempResponse::kArrhenius:
      vcmax = arrhenius_t(m.vcmax25, g.dha_vcmax, t, k.r_gas);
      jmax = arrhenius_t(m.jmax25, g.dha_jmax, t, k.r_gas);
      if (need_tpu) tpu = arrhenius_t(m.tpu25, g.dha_tpu, t, k.r_gas);
      rd = arrhenius_t(m.rd25, S(k.dha_rd), t, k.r_gas);
      break;
    case TempResponse::kPeaked:
      vcmax = peaked_arrhenius_t(m.vcmax25, g.dha_vcmax, k.dhd_vcmax, g.topt_vcmax, t, k.r_gas);
      jmax = peaked_arrhenius_t(m.jmax25, g.dha_jmax, k.dhd_jmax, g.topt_jmax, t, k.r_gas);
      if (need_tpu) tpu = peaked_arrhenius_t(m.tpu25, g.dha_tpu, k.dhd_tpu, g.topt_tpu, t, k.r_gas);
      rd = arrhenius_t(m.rd25, S(k.dha_rd), t, k.r_gas);
      break;
  }
  const S kc = arrhenius_t(g.kc25, S(k.dha_kc), t, k.r_gas);
  const S ko = arrhenius_t(g.ko25, S(k.dha_ko), t, k.r_gas);
  const S gamma_star = arrhenius_t(g.gamma25, S(k.dha_gamma), t, k.r_gas);
  const S j = electron_transport_t(rec.qin, jmax, g.alpha, g.theta, opt.light);

  const S c = opt.use_cc ? S(rec.ci) - rec.a / g.gm : S(rec.ci);
  if (!(value(c) > 0.0)) {
    throw Error(ErrorCode::kNonPositiveC, "non-positive CO2 concentration " + std::to_string(value(c)) +
                                              " at curve " + std::to_string(rec.curve_id) +
                                              ", Ci = " + std::to_string(rec.ci));
  }

  const S wc = vcmax * c / (c + kc * (1.0 + k.o2 / ko));
  const S wj = j * c / (4.0 * (c + 2.0 * gamma_star));
  const S factor = 1.0 - gamma_star / c;

  PointEval<S> out;
  out.ac = wc * factor - rd;
  out.aj = wj * factor - rd;

  double wp_value = std::numeric_limits<double>::infinity();
  if (need_tpu) {
    const S alpha_g = 1.0 / (1.0 + exp(-g.alpha_g_raw));
    const S threshold = (1.0 + 3.0 * alpha_g) * gamma_star;
    if (value(c) > value(threshold)) {
      const S wp = 3.0 * tpu * c / (c - threshold);
      out.ap = wp * factor - rd;
      out.ap_active = true;
      wp_value = value(wp);
    }
  }
  if (!out.ap_active) out.ap = S(std::numeric_limits<double>::infinity());

  // Ties resolve to W_c, then W_j.
  const double vc = value(wc), vj = value(wj);
  if (vc <= vj && vc <= wp_value) {
    out.state = LimitingState::kRubisco;
    out.a_hat = out.ac;
  } else if (vj <= wp_value) {
    out.state = LimitingState::kRubp;
    out.a_hat = out.aj;
  } else {
    out.state = LimitingState::kTpu;
    out.a_hat = out.ap;
  }
  return out;
}

}  // namespace fvcb::detail
