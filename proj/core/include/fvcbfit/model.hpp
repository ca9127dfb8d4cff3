#pragma once

#include <cstddef>

#include "fvcbfit/dataset.hpp"
#include "fvcbfit/parameters.hpp"

namespace fvcb {

inline constexpr double kReferenceTempK = 298.0;
inline constexpr double kGasConstant = 0.008314;  // kJ/mol/K

/// Which carboxylation rate is the active minimum.
enum class LimitingState : char { kRubisco = 'c', kRubp = 'j', kTpu = 'p' };

inline char label(LimitingState s) { return static_cast<char>(s); }

// Temperature responses. `tleaf_k` is in Kelvin, energies in kJ/mol.
double arrhenius(double k25, double dha, double tleaf_k, double r_gas = kGasConstant);

/// Arrhenius with a deactivation term; maximal at `topt`. Throws DomainError
/// unless dhd > dha > 0.
double peaked_arrhenius(double k25, double dha, double dhd, double topt, double tleaf_k,
                        double r_gas = kGasConstant);

/// Optimum temperature from an entropy term `ds` (kJ/mol/K):
/// ds = dhd/topt + R ln(dha / (dhd - dha)).
double topt_from_entropy(double ds, double dha, double dhd, double r_gas = kGasConstant);
double entropy_from_topt(double topt, double dha, double dhd, double r_gas = kGasConstant);

/// Potential electron transport rate for absorbed PPFD `qin`.
double electron_transport(double qin, double jmax, double alpha, double theta, LightResponse type);

/// Kinetic quantities already scaled to leaf temperature.
struct LeafRates {
  double vcmax = 0.0;
  double j = 0.0;
  double tpu = 0.0;
  double kc = 0.0;
  double ko = 0.0;
  double gamma_star = 0.0;
  double alpha_g = 0.0;
};

struct LimitationRates {
  double wc = 0.0;
  double wj = 0.0;
  double wp = 0.0;  // +inf where TPU cannot limit (C <= (1 + 3 α_g) Γ*)
};

LimitationRates limitation_rates(double c, const LeafRates& rates, double o2);

struct ModelOptions {
  LightResponse light = LightResponse::kConstant;
  TempResponse temp = TempResponse::kNone;
  bool use_cc = false;       // replace Ci by Ci - A_measured / gm
  bool exclude_tpu = false;  // light curves: W_p never limits
};

ModelOptions model_options(const FitConfig& config, const ResponseCurve& curve);

struct Prediction {
  double a = 0.0;
  LimitingState state = LimitingState::kRubisco;
  double ac = 0.0;  // branch rates after the (1 - Γ*/C) factor and R_d
  double aj = 0.0;
  double ap = 0.0;  // +inf when W_p is excluded
};

Prediction net_assimilation(const GasExchangeRecord& record, const MainParams& main, const GroupParams& group,
                            const FvCBConstants& constants, const ModelOptions& options);

Prediction net_assimilation(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                            std::size_t curve, std::size_t point);

}  // namespace fvcb
