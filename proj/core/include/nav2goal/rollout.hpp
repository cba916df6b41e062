#pragma once

#include <vector>

#include "nav2goal/action_decoder.hpp"
#include "nav2goal/config.hpp"
#include "nav2goal/explorer.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/sensors.hpp"
#include "nav2goal/state_estimator.hpp"
#include "nav2goal/trajectory.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::rollout {

struct ExploreCollectParams {
  int episodes = 60;
  int steps = 340;
  double start_altitude = 1.0;
  double start_region = 0.25;
  /// Inference dropout of the behaviour policy.
  double dropout = 0.1;
  /// Turn the entropy-gated exploration off (plain behaviour-policy rollouts).
  bool explore = true;

  static ExploreCollectParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "explore.");
};

struct RolloutSetup {
  explore::ExploreConfig explore;
  net::DecoderConfig decoder;
  sim::NoiseParams noise;
  est::EstimatorConfig estimator;
  sim::CameraParams camera;
};

/// Behaviour-policy rollouts with entropy-gated yaw exploration. Each record
/// carries the true pose, the on-board estimate, and the executed classes
/// (rounded expected class of the mixed heads). Episode e runs in
/// worlds[e % worlds.size()].
std::vector<hindsight::Trajectory> collect_explore_dataset(const std::vector<sim::World>& worlds,
                                                           const net::PolicyNetwork& behaviour,
                                                           const ExploreCollectParams& params,
                                                           const RolloutSetup& setup, std::uint64_t seed);

}  // namespace nav2goal::rollout
