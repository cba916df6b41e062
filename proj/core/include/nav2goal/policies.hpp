#pragma once

#include <optional>
#include <string>

#include "nav2goal/network.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::mission {

/// Anything that maps an observation and an optional robot-frame goal (metres) to action heads.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  virtual bool goal_conditioned() const = 0;
  virtual ActionHeads act(const sim::Observation& obs, const std::optional<Vec2>& goal, Rng& rng) = 0;
};

/// Network policy with dropout left on at inference (rate 0 turns it off).
class NetworkPolicy : public Policy {
 public:
  NetworkPolicy(const net::PolicyNetwork& net, double dropout, std::string name);
  std::string name() const override { return name_; }
  bool goal_conditioned() const override { return net_->arch().goal_conditioned(); }
  ActionHeads act(const sim::Observation& obs, const std::optional<Vec2>& goal, Rng& rng) override;

 private:
  const net::PolicyNetwork* net_;
  double dropout_;
  std::string name_;
};

/// yaw = one-hot of clamp(round(bearing / bin_width)), pitch = one-hot class 0.
/// A goal exactly behind the robot resolves anti-clockwise.
ActionHeads greedy_policy(const Vec2& goal_robot_frame, double bin_width = deg2rad(15.0));
ActionHeads greedy_policy(const Pose& estimate, const Vec2& waypoint, double bin_width = deg2rad(15.0));

class GreedyPolicy : public Policy {
 public:
  explicit GreedyPolicy(double bin_width = deg2rad(15.0)) : bin_width_(bin_width) {}
  std::string name() const override { return "greedy"; }
  bool goal_conditioned() const override { return true; }
  ActionHeads act(const sim::Observation& obs, const std::optional<Vec2>& goal, Rng& rng) override;

 private:
  double bin_width_;
};

}  // namespace nav2goal::mission
