#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "fvcbfit/fvcbfit.hpp"
#include "test_util.hpp"

namespace testutil {

using namespace fvcb;

struct Draw {
  Dataset ds;
  FitConfig cfg;
  ParameterState st;
};

// Random dataset, configuration and parameter point. Curves mix temperatures
// and, for light-response models, include an A/Q curve.
inline Draw random_draw(std::mt19937_64& rng, int index) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto between = [&](double lo, double hi) { return lo + (hi - lo) * u(rng); };
  Draw d;
  d.cfg.light = static_cast<LightResponse>(index % 3);
  d.cfg.temp = static_cast<TempResponse>((index / 3) % 3);
  d.cfg.fit_gm = index % 4 == 1;
  d.cfg.fit_kinetics = index % 5 == 2;
  d.cfg.onefit = index % 11 == 3;
  d.cfg.penalties.vj_correlation = index % 7 == 0;
  d.cfg.penalties.positive_rd = index % 6 != 5;

  const int n_curves = d.cfg.penalties.vj_correlation ? 7 : 2 + index % 3;
  std::vector<ResponseCurve> curves;
  for (int c = 0; c < n_curves; ++c) {
    SynthSpec s;
    s.main = {between(60, 140), between(120, 260), between(10, 20), between(0.5, 2.5)};
    s.tleaf_c = between(18.0, 38.0);
    s.light = d.cfg.light;
    s.temp = TempResponse::kArrhenius;
    s.noise_sd = 0.5;
    s.seed = rng();
    s.curve_id = c + 1;
    s.fitting_group = 1 + c % 2;
    if (d.cfg.light != LightResponse::kConstant && c == n_curves - 1) {
      s.kind = CurveKind::kLightResponse;
      s.grid = linear_grid(20.0, 2000.0, 12);
    } else {
      s.grid = linear_grid(between(40, 80), between(1200, 1800), 25 + c);
    }
    curves.push_back(generate_curve(s).curve);
  }
  d.ds = testutil::make_dataset(curves);
  d.st = init_parameters(d.ds, d.cfg);
  for (auto& m : d.st.main) {
    m = {between(50, 150), between(100, 300), between(8, 30), between(-1.0, 3.0)};
  }
  for (auto& g : d.st.groups) {
    g.dha_vcmax = between(40, 90);
    g.dha_jmax = between(20, 70);
    g.dha_tpu = between(30, 80);
    g.topt_vcmax = between(300, 318);
    g.topt_jmax = between(300, 318);
    g.topt_tpu = between(300, 318);
    g.alpha = between(0.2, 0.9);
    g.theta = between(0.1, 0.95);
    g.alpha_g_raw = between(-6, 0);
    g.gm = between(3, 20);
    g.kc25 = between(300, 500);
    g.ko25 = between(200, 350);
    g.gamma25 = between(35, 50);
  }
  return d;
}

inline bool gradient_close(double analytic, double fd) {
  const double diff = std::abs(analytic - fd);
  return diff <= 1e-7 || diff <= 1e-4 * std::abs(fd);
}

inline double central_difference(const Draw& d, const ParamLayout& layout, std::size_t i) {
  std::vector<double> x = layout.gather(d.st);
  const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
  ParameterState plus = d.st, minus = d.st;
  x[i] += h;
  layout.scatter(x, plus);
  x[i] -= 2 * h;
  layout.scatter(x, minus);
  return (total_loss(d.ds, plus, d.cfg).total - total_loss(d.ds, minus, d.cfg).total) / (2 * h);
}

}  // namespace testutil
