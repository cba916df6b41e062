#pragma once

#include <string>
#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/mission.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/trajectory.hpp"

namespace nav2goal::mission {

struct SpliceConfig {
  /// Join tolerances: position (m) and heading (rad).
  double eps_position = 0.5;
  double eps_heading = deg2rad(15.0);
  /// Arc-length spacing of the emitted waypoints (m).
  double spacing = 2.0;
  int waypoints = 10;
  /// Minimum records taken from a donor before the next join.
  int min_segment_steps = 12;
  /// Chance of taking an available join at each eligible record.
  double join_probability = 0.15;
  int attempts = 200;
  /// Reach threshold and per-waypoint timeout of the emitted mission (mission.* keys).
  double threshold = 1.0;
  double timeout = 60.0;

  void validate() const;
  static SpliceConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "splice.");
};

/// Records [begin, end] (inclusive) of one donor trajectory.
struct Segment {
  std::size_t trajectory = 0;
  int begin = 0;
  int end = 0;

  bool operator==(const Segment&) const = default;
};

struct SplicedMission {
  Mission mission;
  std::vector<Segment> segments;
  /// Planar polyline through every used record, joins included.
  std::vector<Vec2> path;
  double path_length = 0.0;
  std::uint64_t world_seed = 0;
  /// Robot state at the first record of the first segment.
  sim::RobotState start{};
  bool complete = false;
  /// Non-empty when the store could not supply the requested length.
  std::string warning;
};

/// Arc length of the polyline.
double polyline_length(const std::vector<Vec2>& path);
/// Points at arc length spacing, 2*spacing, ... (count of them, fewer if the
/// polyline is shorter).
std::vector<Vec2> resample_polyline(const std::vector<Vec2>& path, double spacing, int count);

/// Chains segments of stored trajectories from one world, joining donors whose
/// poses agree within the tolerances, and places waypoints along the chain.
/// Collision-flagged trajectories are skipped. Returns the longest chain found;
/// complete is false (with a warning) if it is shorter than the mission needs.
SplicedMission splice_waypoints(const std::vector<hindsight::Trajectory>& store, const SpliceConfig& config,
                                Rng& rng);

struct ReplayResult {
  std::vector<Vec2> path;
  /// Smallest distance from each waypoint to the replayed path.
  std::vector<double> waypoint_distance;
  double max_distance = 0.0;
  /// Replay hit terrain (only checked when a world is given).
  bool collision = false;
};

/// Open-loop replay of the donor commands, restarting from each donor's
/// recorded state at every join.
ReplayResult replay_spliced(const std::vector<hindsight::Trajectory>& store, const SplicedMission& spliced,
                            const sim::RobotState& limits = {}, const sim::World* world = nullptr);

}  // namespace nav2goal::mission
