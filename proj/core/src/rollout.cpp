#include "nav2goal/rollout.hpp"

#include <stdexcept>

#include "nav2goal/expert.hpp"

namespace nav2goal::rollout {

ExploreCollectParams ExploreCollectParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  ExploreCollectParams p;
  p.episodes = cfg.get_int(prefix + "episodes", p.episodes);
  p.steps = cfg.get_int(prefix + "steps", p.steps);
  p.start_altitude = cfg.get_double(prefix + "start_altitude", p.start_altitude);
  p.start_region = cfg.get_double(prefix + "start_region", p.start_region);
  p.dropout = cfg.get_double(prefix + "dropout", p.dropout);
  p.explore = cfg.get_bool(prefix + "enabled", p.explore);
  return p;
}

std::vector<hindsight::Trajectory> collect_explore_dataset(const std::vector<sim::World>& worlds,
                                                           const net::PolicyNetwork& behaviour,
                                                           const ExploreCollectParams& params,
                                                           const RolloutSetup& setup, std::uint64_t seed) {
  if (behaviour.arch().goal_conditioned()) throw std::invalid_argument("behaviour policy must be goal-free");
  std::vector<hindsight::Trajectory> out;
  if (params.episodes <= 0 || worlds.empty()) return out;
  if (params.steps <= 0) throw std::invalid_argument("collect_explore_dataset: steps must be positive");
  setup.explore.validate();
  for (int e = 0; e < params.episodes; ++e) {
    const sim::World& world = worlds[static_cast<std::size_t>(e) % worlds.size()];
    const auto stream = 0xE0000 + 16 * static_cast<std::uint64_t>(e);
    Rng start_rng = make_rng(seed, stream);
    Rng sensor_rng = make_rng(seed, stream + 1);
    Rng policy_rng = make_rng(seed, stream + 2);
    Rng explore_rng = make_rng(seed, stream + 3);
    sim::RobotState state = expert::sample_start_state(world, params.start_region, params.start_altitude, start_rng);
    sim::SensorModel sensors(setup.noise, setup.camera);
    est::StateEstimator estimator(setup.estimator, state.pose);
    net::ActionDecoder decoder(setup.decoder);
    explore::ExploreState xstate;

    hindsight::Trajectory traj;
    traj.id = static_cast<std::uint32_t>(e);
    traj.seed = world.seed();
    traj.records.reserve(static_cast<std::size_t>(params.steps));
    for (int t = 0; t < params.steps; ++t) {
      hindsight::TrajectoryRecord rec;
      rec.observation = sim::render_observation(world, state.pose, setup.camera);
      const auto mask = net::sample_dropout_mask(behaviour.arch().hidden, params.dropout, policy_rng);
      ActionHeads heads = behaviour.forward(rec.observation, std::nullopt, &mask);
      if (params.explore) {
        const auto step = explore::explore_step(heads, xstate, setup.explore, explore_rng, kControlDt);
        heads = step.heads;
        xstate = step.state;
      }
      const auto cmd = decoder.decode(heads);
      rec.time_index = t;
      rec.true_pose = state.pose;
      rec.est_pose = estimator.pose(state.pose.pitch);
      rec.action = {clamp_class(expected_class(heads.yaw)), clamp_class(expected_class(heads.pitch))};
      rec.speed = state.speed;
      rec.yaw_rate = state.yaw_rate;
      rec.pitch_rate = state.pitch_rate;
      rec.command = {cmd.yaw_rate, cmd.pitch_rate};
      traj.records.push_back(std::move(rec));

      const sim::RobotState prev = state;
      state = sim::step_dynamics(state, cmd.yaw_rate, cmd.pitch_rate, kControlDt, world.current());
      if (!world.contains(state.pose.x, state.pose.y)) break;
      if (world.altitude(state.pose) <= 0.0) {
        traj.collision = true;
        break;
      }
      estimator.step(sensors.sense(world, state, prev, sensor_rng), kControlDt);
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace nav2goal::rollout
