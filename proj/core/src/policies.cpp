#include "nav2goal/policies.hpp"

#include <cmath>
#include <stdexcept>

#include "nav2goal/relabel.hpp"

namespace nav2goal::mission {

NetworkPolicy::NetworkPolicy(const net::PolicyNetwork& net, double dropout, std::string name)
    : net_(&net), dropout_(dropout), name_(std::move(name)) {}

ActionHeads NetworkPolicy::act(const sim::Observation& obs, const std::optional<Vec2>& goal, Rng& rng) {
  std::optional<Vec2> g = net_->arch().goal_conditioned() ? goal : std::nullopt;
  if (net_->arch().goal_conditioned() && !g) throw std::invalid_argument(name_ + ": goal-conditioned policy needs a goal");
  if (dropout_ > 0.0) {
    const auto mask = net::sample_dropout_mask(net_->arch().hidden, dropout_, rng);
    return net_->forward(obs, g, &mask);
  }
  return net_->forward(obs, g, nullptr);
}

ActionHeads greedy_policy(const Vec2& goal, double bin_width) {
  // wrap_angle maps -pi to +pi, so a goal straight behind turns anti-clockwise.
  const double bearing = wrap_angle(std::atan2(goal.y, goal.x));
  ActionHeads h;
  h.yaw = one_hot(clamp_class(bearing / bin_width));
  h.pitch = one_hot(0);
  return h;
}

ActionHeads greedy_policy(const Pose& estimate, const Vec2& waypoint, double bin_width) {
  return greedy_policy(hindsight::diff(estimate, Pose{waypoint.x, waypoint.y, 0.0, 0.0, 0.0}), bin_width);
}

ActionHeads GreedyPolicy::act(const sim::Observation&, const std::optional<Vec2>& goal, Rng&) {
  if (!goal) throw std::invalid_argument("greedy policy needs a goal");
  return greedy_policy(*goal, bin_width_);
}

}  // namespace nav2goal::mission
