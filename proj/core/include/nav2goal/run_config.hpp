#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "nav2goal/config.hpp"
#include "nav2goal/expert.hpp"
#include "nav2goal/explorer.hpp"
#include "nav2goal/mission.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/relabel.hpp"
#include "nav2goal/rollout.hpp"
#include "nav2goal/splice.hpp"
#include "nav2goal/trainer.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::pipeline {

struct GcConfig {
  net::TrainConfig train;
  net::GoalFusion fusion = net::GoalFusion::multiply;
  net::GoalFormat goal_format = net::GoalFormat::cartesian;
  int samples_per_epoch = 20000;
  int validation_samples = 4000;
  /// Initialize the shared layers from the behaviour policy.
  bool warm_start = true;
  /// Keep the warm-started convolution and dense layers fixed.
  bool freeze_backbone = true;
  /// Also train the concatenation variant and score goal sensitivity.
  bool ablation = true;

  static GcConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "train.gc.");
};

struct CompareConfig {
  int trials = 30;
  double goal_min = 5.0;
  double goal_max = 8.0;
  /// Trial worlds use the world section with these overrides.
  double relief_amplitude = 0.1;
  double obstacle_density = 0.0;
  double start_altitude = 1.0;
  double start_region = 0.25;
  /// Inference dropout of the network policy.
  double dropout = 0.1;

  static CompareConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "compare.");
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "out";
  /// Number of generated training worlds.
  int worlds = 10;
  /// Spliced missions written by the splice command.
  int missions = 10;

  sim::WorldParams world;
  sim::CameraParams camera;
  expert::ExpertParams expert;
  expert::CollectParams collect;
  net::Architecture bc_arch;
  net::TrainConfig bc_train;
  GcConfig gc;
  explore::ExploreConfig explore;
  rollout::ExploreCollectParams explore_collect;
  hindsight::RelabelConfig relabel;
  mission::SpliceConfig splice;
  mission::MissionParams mission;
  CompareConfig compare;

  /// Reads every section; unknown keys raise ConfigError.
  static RunConfig from_config(const KeyValueConfig& cfg);
  static RunConfig load(const std::filesystem::path& path);
};

}  // namespace nav2goal::pipeline
