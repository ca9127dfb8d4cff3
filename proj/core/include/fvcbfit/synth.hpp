#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fvcbfit/dataset.hpp"
#include "fvcbfit/parameters.hpp"

namespace fvcb {

/// Recipe for one synthetic curve. `grid` holds Ci values for A/Ci curves
/// and PPFD values for light curves; it must be strictly increasing.
struct SynthSpec {
  MainParams main;
  GroupParams group;
  FvCBConstants constants;
  LightResponse light = LightResponse::kConstant;
  TempResponse temp = TempResponse::kNone;
  CurveKind kind = CurveKind::kCO2Response;
  std::vector<double> grid;
  double qin = 2000.0;  // held PPFD for A/Ci curves
  double ci = 300.0;    // held Ci for light curves
  double tleaf_c = 25.0;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
  bool jitter = false;
  double scale_jitter = 0.10;
  int curve_id = 1;
  int fitting_group = 1;
};

struct SyntheticCurve {
  ResponseCurve curve;
  MainParams truth;  // main parameters after jitter
};

std::vector<double> linear_grid(double first, double last, std::size_t count);

/// 150 evenly spaced Ci values from 50 to 1800 µmol/mol.
std::vector<double> default_ci_grid();

/// Scales each main parameter by an independent Uniform[1 - f, 1 + f] factor.
MainParams jitter_main(const MainParams& main, double fraction, std::mt19937_64& rng);

/// Evaluates the forward model on the grid and adds independent Gaussian
/// noise, one draw per point. Jitter draws precede noise draws.
SyntheticCurve generate_curve(const SynthSpec& spec);

}  // namespace fvcb
