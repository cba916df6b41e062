#include "nav2goal/dynamics.hpp"

#include <algorithm>
#include <stdexcept>

namespace nav2goal::sim {

namespace {

double slew(double current, double target, double max_step) {
  return current + std::clamp(target - current, -max_step, max_step);
}

}  // namespace

RobotState step_dynamics(const RobotState& state, double yaw_cmd, double pitch_cmd, double dt, Vec2 current) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_dynamics: dt must be positive");
  RobotState next = state;
  const double yaw_target = std::clamp(yaw_cmd, -state.max_yaw_rate, state.max_yaw_rate);
  const double pitch_target = std::clamp(pitch_cmd, -state.max_pitch_rate, state.max_pitch_rate);
  next.yaw_rate = std::clamp(slew(state.yaw_rate, yaw_target, state.max_yaw_rate * dt / kRateSlewTime),
                             -state.max_yaw_rate, state.max_yaw_rate);
  next.pitch_rate = std::clamp(slew(state.pitch_rate, pitch_target, state.max_pitch_rate * dt / kRateSlewTime),
                               -state.max_pitch_rate, state.max_pitch_rate);

  const Pose& p = state.pose;
  const double pitch_end = std::clamp(p.pitch + next.pitch_rate * dt, kMinPitch, kMaxPitch);
  const double pitch_mid = 0.5 * (p.pitch + pitch_end);
  const double horizontal = state.speed * std::cos(pitch_mid) * dt;
  const double dyaw = next.yaw_rate * dt;

  // Exact arc integration for a constant yaw rate over the step.
  double dx = 0.0;
  double dy = 0.0;
  if (std::abs(dyaw) > 1e-12) {
    const double radius = horizontal / dyaw;
    dx = radius * (std::sin(p.yaw + dyaw) - std::sin(p.yaw));
    dy = -radius * (std::cos(p.yaw + dyaw) - std::cos(p.yaw));
  } else {
    dx = horizontal * std::cos(p.yaw);
    dy = horizontal * std::sin(p.yaw);
  }

  next.pose.x = p.x + dx + current.x * dt;
  next.pose.y = p.y + dy + current.y * dt;
  next.pose.z = p.z - state.speed * std::sin(pitch_mid) * dt;
  next.pose.yaw = wrap_angle(p.yaw + dyaw);
  next.pose.pitch = pitch_end;
  return next;
}

}  // namespace nav2goal::sim
