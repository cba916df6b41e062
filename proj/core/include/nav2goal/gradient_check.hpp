#pragma once

#include "nav2goal/network.hpp"

namespace nav2goal::net {

struct GradientCheckResult {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Central finite differences on every parameter against compute_loss's
/// analytic gradient. Relative error is |a - n| / max(|a|, |n|, floor).
GradientCheckResult gradient_check(PolicyNetwork& net, std::span<const Example> batch, const LossConfig& config,
                                   double epsilon = 1e-5, const std::vector<DropoutMask>* masks = nullptr,
                                   double floor = 1e-6);

}  // namespace nav2goal::net
