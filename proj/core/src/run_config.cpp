#include "nav2goal/run_config.hpp"

#include <stdexcept>

namespace nav2goal::pipeline {

namespace {

template <class F>
auto checked(const std::string& section, F&& f) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(section + ": " + e.what());
  }
}

}  // namespace

GcConfig GcConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  GcConfig c;
  c.train = checked(prefix, [&] { return net::TrainConfig::from_config(cfg, prefix); });
  c.fusion = checked(prefix, [&] { return net::parse_fusion(cfg.get_string(prefix + "fusion", "multiply")); });
  if (c.fusion == net::GoalFusion::none) throw ConfigError(prefix + "fusion must be multiply or concatenate");
  c.goal_format =
      checked(prefix, [&] { return net::parse_goal_format(cfg.get_string(prefix + "goal_format", "cartesian")); });
  c.samples_per_epoch = cfg.get_int(prefix + "samples_per_epoch", c.samples_per_epoch);
  c.validation_samples = cfg.get_int(prefix + "validation_samples", c.validation_samples);
  c.warm_start = cfg.get_bool(prefix + "warm_start", c.warm_start);
  c.freeze_backbone = cfg.get_bool(prefix + "freeze_backbone", c.freeze_backbone);
  c.ablation = cfg.get_bool(prefix + "ablation", c.ablation);
  if (c.samples_per_epoch <= 0 || c.validation_samples <= 0) {
    throw ConfigError(prefix + "samples_per_epoch and validation_samples must be positive");
  }
  return c;
}

CompareConfig CompareConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  CompareConfig c;
  c.trials = cfg.get_int(prefix + "trials", c.trials);
  c.goal_min = cfg.get_double(prefix + "goal_min", c.goal_min);
  c.goal_max = cfg.get_double(prefix + "goal_max", c.goal_max);
  c.relief_amplitude = cfg.get_double(prefix + "relief_amplitude", c.relief_amplitude);
  c.obstacle_density = cfg.get_double(prefix + "obstacle_density", c.obstacle_density);
  c.start_altitude = cfg.get_double(prefix + "start_altitude", c.start_altitude);
  c.start_region = cfg.get_double(prefix + "start_region", c.start_region);
  c.dropout = cfg.get_double(prefix + "dropout", c.dropout);
  if (c.trials <= 0) throw ConfigError(prefix + "trials must be positive");
  if (!(c.goal_min > 0.0 && c.goal_max >= c.goal_min)) throw ConfigError(prefix + "need 0 < goal_min <= goal_max");
  if (!(c.dropout >= 0.0 && c.dropout < 1.0)) throw ConfigError(prefix + "dropout must lie in [0, 1)");
  return c;
}

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
  RunConfig r;
  r.seed = cfg.get_u64("pipeline.seed", r.seed);
  r.out_dir = cfg.get_string("pipeline.out", r.out_dir.string());
  r.worlds = cfg.get_int("pipeline.worlds", r.worlds);
  r.missions = cfg.get_int("pipeline.missions", r.missions);
  if (r.worlds <= 0 || r.missions <= 0) throw ConfigError("pipeline: worlds and missions must be positive");

  r.world = checked("world", [&] { return sim::WorldParams::from_config(cfg); });
  r.camera = checked("camera", [&] { return sim::CameraParams::from_config(cfg); });
  r.expert = checked("expert", [&] { return expert::ExpertParams::from_config(cfg); });
  r.collect = checked("collect", [&] { return expert::CollectParams::from_config(cfg); });
  r.bc_arch.hidden = cfg.get_int("train.hidden", r.bc_arch.hidden);
  r.bc_arch.padding = cfg.get_int("train.padding", r.bc_arch.padding);
  checked("train", [&] { r.bc_arch.validate(); return 0; });
  r.bc_train = checked("train", [&] { return net::TrainConfig::from_config(cfg); });
  r.gc = GcConfig::from_config(cfg);
  r.explore = checked("explore", [&] { return explore::ExploreConfig::from_config(cfg); });
  r.explore_collect = checked("explore", [&] { return rollout::ExploreCollectParams::from_config(cfg); });
  r.relabel = checked("relabel", [&] { return hindsight::RelabelConfig::from_config(cfg); });
  r.splice = checked("splice", [&] { return mission::SpliceConfig::from_config(cfg); });
  r.mission = checked("mission", [&] { return mission::MissionParams::from_config(cfg); });
  r.compare = CompareConfig::from_config(cfg);
  cfg.reject_unused();
  return r;
}

RunConfig RunConfig::load(const std::filesystem::path& path) { return from_config(KeyValueConfig::from_file(path)); }

}  // namespace nav2goal::pipeline
