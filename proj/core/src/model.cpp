#include "fvcbfit/model.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "fvcbfit/detail/model_eval.hpp"
#include "fvcbfit/error.hpp"

namespace fvcb {

double arrhenius(double k25, double dha, double tleaf_k, double r_gas) {
  return detail::arrhenius_t(k25, dha, tleaf_k, r_gas);
}

double peaked_arrhenius(double k25, double dha, double dhd, double topt, double tleaf_k, double r_gas) {
  return detail::peaked_arrhenius_t(k25, dha, dhd, topt, tleaf_k, r_gas);
}

double topt_from_entropy(double ds, double dha, double dhd, double r_gas) {
  if (!(dha > 0.0) || !(dhd > dha)) {
    throw Error(ErrorCode::kDomainError, "entropy conversion needs dHd > dHa > 0");
  }
  const double denom = ds - r_gas * std::log(dha / (dhd - dha));
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::kDomainError, "entropy " + std::to_string(ds) + " gives a non-positive denominator");
  }
  const double topt = dhd / denom;
  if (!std::isfinite(topt)) throw Error(ErrorCode::kDomainError, "entropy conversion is singular");
  return topt;
}

double entropy_from_topt(double topt, double dha, double dhd, double r_gas) {
  if (!(dha > 0.0) || !(dhd > dha) || !(topt > 0.0)) {
    throw Error(ErrorCode::kDomainError, "entropy conversion needs dHd > dHa > 0 and Topt > 0");
  }
  return dhd / topt + r_gas * std::log(dha / (dhd - dha));
}

double electron_transport(double qin, double jmax, double alpha, double theta, LightResponse type) {
  return detail::electron_transport_t(qin, jmax, alpha, theta, type);
}

LimitationRates limitation_rates(double c, const LeafRates& r, double o2) {
  LimitationRates out;
  out.wc = r.vcmax * c / (c + r.kc * (1.0 + o2 / r.ko));
  out.wj = r.j * c / (4.0 * (c + 2.0 * r.gamma_star));
  const double threshold = (1.0 + 3.0 * r.alpha_g) * r.gamma_star;
  out.wp = c > threshold ? 3.0 * r.tpu * c / (c - threshold) : std::numeric_limits<double>::infinity();
  return out;
}

ModelOptions model_options(const FitConfig& config, const ResponseCurve& curve) {
  ModelOptions opt;
  opt.light = config.light;
  opt.temp = config.temp;
  opt.use_cc = config.fit_gm;
  opt.exclude_tpu = curve.is_light();
  return opt;
}

Prediction net_assimilation(const GasExchangeRecord& record, const MainParams& main, const GroupParams& group,
                            const FvCBConstants& constants, const ModelOptions& options) {
  auto e = detail::evaluate_point(record, detail::constant_main<double>(main),
                                  detail::constant_group<double>(group), constants, options);
  return {e.a_hat, e.state, e.ac, e.aj, e.ap};
}

Prediction net_assimilation(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                            std::size_t curve, std::size_t point) {
  const auto& c = dataset.curves.at(curve);
  return net_assimilation(c.records.at(point), state.main_of(curve), state.group_of(curve), state.constants,
                          model_options(config, c));
}

}  // namespace fvcb
