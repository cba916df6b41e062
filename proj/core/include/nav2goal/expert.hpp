#pragma once

#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/dynamics.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/trajectory.hpp"
#include "nav2goal/types.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::expert {

struct ExpertParams {
  /// Angular width of one yaw class.
  double bin_width = deg2rad(15.0);
  double avoid_range = 3.0;
  double avoid_half_angle = deg2rad(30.0);
  /// Obstacle hits deeper than this below the robot do not count as intrusions.
  double avoid_clearance = 0.6;
  /// Coral hits are weighted by exp(-(d - d_nearest) / nearest_softness), d planar distance.
  double nearest_softness = 5.0;
  double perturb_prob = 0.2;
  double altitude_low = 0.5;
  double altitude_high = 1.5;
  /// Desired pitch per metre of altitude error outside the band.
  double altitude_gain = deg2rad(40.0);
  double max_target_pitch = deg2rad(25.0);
  /// Pitch-rate per class and the time constant used to quantize pitch corrections.
  double pitch_rate_per_class = deg2rad(10.0);
  double pitch_time_constant = 1.0;

  static ExpertParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "expert.");
};

enum class ExpertBranch { avoid, coral, no_coral };

struct ExpertDecision {
  ActionLabel label;
  ExpertBranch branch = ExpertBranch::no_coral;
};

/// Scripted labeller. Reads coral and obstacle positions from the ray fan's
/// world-frame hits, privileged information the learner never gets.
ExpertDecision expert_decide(const sim::World& world, const Pose& pose, const sim::RayFan& fan, Rng& rng,
                             const ExpertParams& params = {});

ActionLabel expert_action(const sim::World& world, const Pose& pose, Rng& rng, const ExpertParams& params = {},
                          const sim::CameraParams& camera = {});

struct LabeledFrame {
  sim::Observation observation;
  ActionLabel label;
  Pose pose;
  int time_index = 0;
};

/// Frame view of a stored record.
LabeledFrame labeled_frame(const hindsight::TrajectoryRecord& record);

struct CollectParams {
  int episodes = 50;
  int steps = 360;
  double start_altitude = 1.0;
  /// Starts are drawn inside this margin-free central square (fraction of extent).
  double start_region = 0.25;
  double rate_per_class = deg2rad(10.0);

  static CollectParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "collect.");
};

/// Start state sampled in the central region, level, at the configured altitude,
/// not above a rock.
sim::RobotState sample_start_state(const sim::World& world, double start_region, double start_altitude, Rng& rng);

/// Expert-driven episodes in the trajectory-store format; episode e runs in
/// worlds[e % worlds.size()]. Episodes stop at collision (flagged) or when
/// leaving the world.
std::vector<hindsight::Trajectory> collect_bc_dataset(const std::vector<sim::World>& worlds, const CollectParams& collect,
                                               std::uint64_t seed, const ExpertParams& expert = {},
                                               const sim::CameraParams& camera = {});

}  // namespace nav2goal::expert
