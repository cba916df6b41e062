#include "nav2goal/gradient_check.hpp"

#include <algorithm>
#include <cmath>

namespace nav2goal::net {

GradientCheckResult gradient_check(PolicyNetwork& net, std::span<const Example> batch, const LossConfig& config,
                                   double epsilon, const std::vector<DropoutMask>* masks, double floor) {
  std::vector<std::vector<double>> inputs;
  inputs.reserve(batch.size());
  for (const auto& ex : batch) inputs.push_back(encode_observation(*ex.observation, net.arch()));
  const auto analytic = compute_loss_encoded(net, inputs, batch, config, masks, true).grad;

  GradientCheckResult out;
  auto params = net.params();
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + epsilon;
    const double up = compute_loss_encoded(net, inputs, batch, config, masks, false).total;
    params[i] = saved - epsilon;
    const double down = compute_loss_encoded(net, inputs, batch, config, masks, false).total;
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double abs_err = std::abs(analytic[i] - numeric);
    const double rel = abs_err / std::max({std::abs(analytic[i]), std::abs(numeric), floor});
    if (rel > out.max_relative_error) {
      out.max_relative_error = rel;
      out.worst_index = i;
    }
    out.max_absolute_error = std::max(out.max_absolute_error, abs_err);
    ++out.checked;
  }
  return out;
}

}  // namespace nav2goal::net
