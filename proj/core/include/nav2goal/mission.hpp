#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nav2goal/action_decoder.hpp"
#include "nav2goal/config.hpp"
#include "nav2goal/csv.hpp"
#include "nav2goal/dynamics.hpp"
#include "nav2goal/policies.hpp"
#include "nav2goal/sensors.hpp"
#include "nav2goal/state_estimator.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::mission {

struct Mission {
  std::vector<Vec2> waypoints;
  double threshold = 1.0;
  /// Time allowed per waypoint (s).
  double timeout = 60.0;
  /// Where the mission was generated, when known.
  std::optional<std::uint64_t> world_seed;
  std::optional<Pose> start;

  void validate() const;
};

/// Plain-text waypoint list: optional "threshold <m>", "timeout <s>",
/// "world <seed>" and "start <x> <y> <z> <yaw> <pitch>" lines, then one "x y"
/// pair per line. '#' starts a comment.
Mission parse_mission(const std::string& text);
std::string format_mission(const Mission& m);

struct MissionParams {
  net::DecoderConfig decoder;
  est::EstimatorConfig estimator;
  sim::NoiseParams noise;
  sim::CameraParams camera;
  /// Feed goals from the true pose instead of the estimate.
  bool use_true_pose = false;

  static MissionParams from_config(const KeyValueConfig& cfg);
};

struct StepLog {
  int step = 0;
  Pose true_pose;
  Pose est_pose;
  int active = 0;
  Vec2 goal{};
  double yaw_expectation = 0.0;
  double pitch_expectation = 0.0;
  double coral_fraction = 0.0;
  bool collision = false;
};

struct WaypointPass {
  /// Step at which the waypoint became active and, if reached, was reached.
  int activated = 0;
  int reached_step = -1;
  /// Smallest true distance to the waypoint on the first approach
  /// (up to the first local minimum of the distance).
  double first_pass_distance = 0.0;
  /// The first approach bottomed out outside the threshold.
  bool overshoot = false;
};

enum class MissionEnd { completed, timeout, collision, left_world };
std::string to_string(MissionEnd e);

struct MissionLog {
  std::string policy;
  std::vector<Vec2> waypoints;
  std::vector<StepLog> steps;
  std::vector<WaypointPass> passes;
  int reached = 0;
  MissionEnd end = MissionEnd::timeout;
  int collisions = 0;

  bool completed() const { return end == MissionEnd::completed; }
};

/// Closed-loop execution: render, transform the active waypoint into the
/// estimated robot frame, act, decode, integrate, sense, filter. Reaching uses
/// the pose the goals are computed from. Sensor noise and policy dropout draw
/// from independent streams derived from seed.
MissionLog run_mission(const sim::World& world, Policy& policy, const Mission& mission, const sim::RobotState& start,
                       const MissionParams& params, std::uint64_t seed);

csv::Writer mission_log_csv(const MissionLog& log);

}  // namespace nav2goal::mission
