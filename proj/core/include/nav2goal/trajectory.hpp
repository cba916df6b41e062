#pragma once

#include <cstdint>
#include <vector>

#include "nav2goal/dynamics.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::hindsight {

/// One control step of a recorded episode.
struct TrajectoryRecord {
  int time_index = 0;
  sim::Observation observation;
  Pose true_pose;
  /// On-board estimate; equals true_pose when no estimator ran.
  Pose est_pose;
  /// Yaw/pitch classes applied at this step.
  ActionLabel action;
  /// Actuator state at this step, so the episode can be replayed open-loop.
  double speed = 0.41;
  double yaw_rate = 0.0;
  double pitch_rate = 0.0;
  /// Rate commands sent after this observation (rad/s).
  Vec2 command{};

  bool operator==(const TrajectoryRecord&) const = default;
};

struct Trajectory {
  std::uint32_t id = 0;
  /// Seed of the world the episode ran in.
  std::uint64_t seed = 0;
  bool collision = false;
  std::vector<TrajectoryRecord> records;

  std::size_t length() const { return records.size(); }
  bool operator==(const Trajectory&) const = default;
};

/// Replay-ready robot state at record i.
sim::RobotState record_state(const TrajectoryRecord& record, const sim::RobotState& limits);

std::size_t total_records(const std::vector<Trajectory>& trajectories);

}  // namespace nav2goal::hindsight
