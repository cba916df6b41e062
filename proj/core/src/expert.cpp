#include "nav2goal/expert.hpp"

#include <algorithm>
#include <limits>

namespace nav2goal::expert {

ExpertParams ExpertParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  ExpertParams p;
  p.bin_width = deg2rad(cfg.get_double(prefix + "bin_width_deg", rad2deg(p.bin_width)));
  p.avoid_range = cfg.get_double(prefix + "avoid_range", p.avoid_range);
  p.avoid_half_angle = deg2rad(cfg.get_double(prefix + "avoid_half_angle_deg", rad2deg(p.avoid_half_angle)));
  p.avoid_clearance = cfg.get_double(prefix + "avoid_clearance", p.avoid_clearance);
  p.nearest_softness = cfg.get_double(prefix + "nearest_softness", p.nearest_softness);
  p.perturb_prob = cfg.get_double(prefix + "perturb_prob", p.perturb_prob);
  p.altitude_low = cfg.get_double(prefix + "altitude_low", p.altitude_low);
  p.altitude_high = cfg.get_double(prefix + "altitude_high", p.altitude_high);
  p.altitude_gain = deg2rad(cfg.get_double(prefix + "altitude_gain_deg", rad2deg(p.altitude_gain)));
  p.max_target_pitch = deg2rad(cfg.get_double(prefix + "max_target_pitch_deg", rad2deg(p.max_target_pitch)));
  p.pitch_rate_per_class = deg2rad(cfg.get_double(prefix + "pitch_rate_per_class_deg", rad2deg(p.pitch_rate_per_class)));
  p.pitch_time_constant = cfg.get_double(prefix + "pitch_time_constant", p.pitch_time_constant);
  return p;
}

CollectParams CollectParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  CollectParams c;
  c.episodes = cfg.get_int(prefix + "episodes", c.episodes);
  c.steps = cfg.get_int(prefix + "steps", c.steps);
  c.start_altitude = cfg.get_double(prefix + "start_altitude", c.start_altitude);
  c.start_region = cfg.get_double(prefix + "start_region", c.start_region);
  c.rate_per_class = deg2rad(cfg.get_double(prefix + "rate_per_class_deg", rad2deg(c.rate_per_class)));
  return c;
}

LabeledFrame labeled_frame(const hindsight::TrajectoryRecord& record) {
  return {record.observation, record.action, record.true_pose, record.time_index};
}

namespace {

int altitude_pitch_class(const sim::World& world, const Pose& pose, const ExpertParams& p) {
  const double alt = world.altitude(pose);
  double target = 0.0;
  if (alt < p.altitude_low) {
    target = p.altitude_gain * (p.altitude_low - alt);
  } else if (alt > p.altitude_high) {
    target = -p.altitude_gain * (alt - p.altitude_high);
  }
  target = std::clamp(target, -p.max_target_pitch, p.max_target_pitch);
  return clamp_class((target - pose.pitch) / (p.pitch_rate_per_class * p.pitch_time_constant));
}

}  // namespace

ExpertDecision expert_decide(const sim::World& world, const Pose& pose, const sim::RayFan& fan, Rng& rng,
                             const ExpertParams& params) {
  ExpertDecision out;

  double nearest_obstacle = std::numeric_limits<double>::infinity();
  double obstacle_azimuth = 0.0;
  int obstacle_rays = 0;
  for (const auto& ray : fan.forward) {
    if (!ray.hit || ray.hit->surface != sim::SurfaceClass::rock) continue;
    if (ray.hit->distance > params.avoid_range) continue;
    if (std::abs(ray.azimuth_offset) > params.avoid_half_angle) continue;
    if (ray.hit->point.z > pose.z + params.avoid_clearance) continue;
    nearest_obstacle = std::min(nearest_obstacle, ray.hit->distance);
    obstacle_azimuth += ray.azimuth_offset;
    ++obstacle_rays;
  }
  if (obstacle_rays > 0) {
    const double severity = 1.0 + (params.avoid_range - nearest_obstacle);
    out.branch = ExpertBranch::avoid;
    out.label.pitch_class = std::min(kMaxClass, static_cast<int>(std::ceil(severity - 1e-9)));
    out.label.pitch_class = std::max(out.label.pitch_class, 1);
    out.label.yaw_class = obstacle_azimuth / obstacle_rays > 0.0 ? -1 : 1;
    return out;
  }

  out.label.pitch_class = altitude_pitch_class(world, pose, params);

  // Bearing of the visible coral, weighted toward the nearest hits.
  double nearest = std::numeric_limits<double>::infinity();
  for (const auto& ray : fan.forward) {
    if (!ray.hit || ray.hit->surface != sim::SurfaceClass::coral) continue;
    nearest = std::min(nearest, std::hypot(ray.hit->point.x - pose.x, ray.hit->point.y - pose.y));
  }
  if (!std::isfinite(nearest)) {
    out.branch = ExpertBranch::no_coral;
    out.label.yaw_class = uniform_int(rng, -kMaxClass, kMaxClass);
    return out;
  }
  double az_sum = 0.0;
  double w_sum = 0.0;
  for (const auto& ray : fan.forward) {
    if (!ray.hit || ray.hit->surface != sim::SurfaceClass::coral) continue;
    const double d = std::hypot(ray.hit->point.x - pose.x, ray.hit->point.y - pose.y);
    const double w = std::exp(-(d - nearest) / params.nearest_softness);
    az_sum += w * ray.azimuth_offset;
    w_sum += w;
  }
  const double bearing = az_sum / w_sum;
  out.branch = ExpertBranch::coral;
  out.label.yaw_class = clamp_class(bearing / params.bin_width);
  if (bernoulli(rng, params.perturb_prob)) {
    const int delta = bernoulli(rng, 0.5) ? 1 : -1;
    out.label.yaw_class = std::clamp(out.label.yaw_class + delta, -kMaxClass, kMaxClass);
  }
  return out;
}

ActionLabel expert_action(const sim::World& world, const Pose& pose, Rng& rng, const ExpertParams& params,
                          const sim::CameraParams& camera) {
  const auto fan = sim::cast_fan(world, pose, camera);
  return expert_decide(world, pose, fan, rng, params).label;
}

sim::RobotState sample_start_state(const sim::World& world, double start_region, double start_altitude, Rng& rng) {
  const double cx = world.extent_x() / 2.0;
  const double cy = world.extent_y() / 2.0;
  const double hx = start_region * world.extent_x() / 2.0;
  const double hy = start_region * world.extent_y() / 2.0;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const double x = uniform(rng, cx - hx, cx + hx);
    const double y = uniform(rng, cy - hy, cy + hy);
    const double yaw = uniform(rng, -kPi, kPi);
    bool clear = true;
    const int reach = static_cast<int>(std::ceil(2.5 / world.cell_size()));
    const int gx = world.cell_x(x);
    const int gy = world.cell_y(y);
    for (int dy = -reach; dy <= reach && clear; ++dy) {
      for (int dx = -reach; dx <= reach && clear; ++dx) {
        if (world.cell_in_range(gx + dx, gy + dy) && world.surface(gx + dx, gy + dy) == sim::SurfaceClass::rock) {
          clear = false;
        }
      }
    }
    if (!clear) continue;
    sim::RobotState s;
    s.pose = normalized({x, y, world.floor_depth_at(x, y) - start_altitude, yaw, 0.0});
    return s;
  }
  throw std::runtime_error("could not find an obstacle-free start position");
}

std::vector<hindsight::Trajectory> collect_bc_dataset(const std::vector<sim::World>& worlds,
                                                      const CollectParams& collect, std::uint64_t seed,
                                                      const ExpertParams& expert, const sim::CameraParams& camera) {
  std::vector<hindsight::Trajectory> out;
  if (collect.episodes <= 0 || worlds.empty()) return out;
  if (collect.steps <= 0) throw std::invalid_argument("collect_bc_dataset: steps must be positive");
  out.reserve(static_cast<std::size_t>(collect.episodes));
  for (int e = 0; e < collect.episodes; ++e) {
    const sim::World& world = worlds[static_cast<std::size_t>(e) % worlds.size()];
    Rng rng = make_rng(seed, 0xBC000 + static_cast<std::uint64_t>(e));
    sim::RobotState state = sample_start_state(world, collect.start_region, collect.start_altitude, rng);
    hindsight::Trajectory traj;
    traj.id = static_cast<std::uint32_t>(e);
    traj.seed = world.seed();
    traj.records.reserve(static_cast<std::size_t>(collect.steps));
    for (int t = 0; t < collect.steps; ++t) {
      const auto fan = sim::cast_fan(world, state.pose, camera);
      const auto decision = expert_decide(world, state.pose, fan, rng, expert);
      hindsight::TrajectoryRecord rec;
      rec.time_index = t;
      rec.observation = sim::observation_from_fan(fan, camera);
      rec.true_pose = state.pose;
      rec.est_pose = state.pose;
      rec.action = decision.label;
      rec.speed = state.speed;
      rec.yaw_rate = state.yaw_rate;
      rec.pitch_rate = state.pitch_rate;
      rec.command = {decision.label.yaw_class * collect.rate_per_class,
                     decision.label.pitch_class * collect.rate_per_class};
      traj.records.push_back(std::move(rec));
      state = sim::step_dynamics(state, traj.records.back().command.x, traj.records.back().command.y, kControlDt,
                                 world.current());
      if (!world.contains(state.pose.x, state.pose.y)) break;
      if (world.altitude(state.pose) <= 0.0) {
        traj.collision = true;
        break;
      }
    }
    out.push_back(std::move(traj));
  }
  return out;
}

}  // namespace nav2goal::expert
