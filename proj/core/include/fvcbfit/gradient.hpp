#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "fvcbfit/dataset.hpp"
#include "fvcbfit/loss.hpp"
#include "fvcbfit/parameters.hpp"

namespace fvcb {

/// Derivatives of the objective, one entry per fitted parameter in the
/// order of ParamLayout::slots().
struct GradientVector {
  std::vector<ParamSlot> slots;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  std::optional<double> find(ParamId id, std::size_t block) const;
};

struct LossAndGradient {
  LossBreakdown loss;
  GradientVector grad;
};

enum class GradientMode {
  kExact,
  // A_j at the highest-Ci point enters the TPU-transition penalty as a
  // constant, so that penalty only pushes A_p down. Used by fit() unless
  // FitConfig::detach_tpu_target is false.
  kDetachTpuTarget,
};

/// Exact first derivatives by forward-mode differentiation of the per-curve
/// terms. At kinks the branch picked by the forward pass supplies the
/// derivative. Curves are evaluated on `config.jobs` threads and reduced in
/// curve order, so the result does not depend on the thread count.
LossAndGradient loss_gradient(const Dataset& dataset, const ParameterState& state, const FitConfig& config);

/// Same as above with a prebuilt layout; `layout` must describe `state`.
LossAndGradient loss_gradient(const Dataset& dataset, const ParameterState& state, const FitConfig& config,
                              const ParamLayout& layout, GradientMode mode = GradientMode::kExact);

}  // namespace fvcb
