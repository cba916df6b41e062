#pragma once

#include "nav2goal/types.hpp"

namespace nav2goal::sim {

struct RobotState {
  Pose pose{};
  /// Forward water speed, constant for an episode.
  double speed = 0.41;
  double yaw_rate = 0.0;
  double pitch_rate = 0.0;
  double max_yaw_rate = deg2rad(30.0);
  double max_pitch_rate = deg2rad(30.0);
};

/// Time for an actuator rate to slew from zero to its limit.
inline constexpr double kRateSlewTime = 0.5;

/// First-order kinematics: rates slew toward the saturated commands, then the
/// pose follows a constant-rate arc at the commanded speed, plus ambient drift.
RobotState step_dynamics(const RobotState& state, double yaw_cmd, double pitch_cmd, double dt, Vec2 current = {});

}  // namespace nav2goal::sim
