#include "nav2goal/mission.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "nav2goal/metrics.hpp"
#include "nav2goal/relabel.hpp"

namespace nav2goal::mission {

void Mission::validate() const {
  if (waypoints.empty()) throw std::invalid_argument("mission: at least one waypoint required");
  if (!(threshold > 0.0)) throw std::invalid_argument("mission: threshold must be positive");
  if (!(timeout > 0.0)) throw std::invalid_argument("mission: timeout must be positive");
}

Mission parse_mission(const std::string& text) {
  Mission m;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto fail = [&] { throw std::invalid_argument("mission line " + std::to_string(line_no) + ": cannot parse '" + line + "'"); };
    if (first == "threshold" || first == "timeout") {
      double v = 0.0;
      if (!(ls >> v)) fail();
      (first == "threshold" ? m.threshold : m.timeout) = v;
    } else if (first == "world") {
      std::uint64_t seed = 0;
      if (!(ls >> seed)) fail();
      m.world_seed = seed;
    } else if (first == "start") {
      Pose p;
      if (!(ls >> p.x >> p.y >> p.z >> p.yaw >> p.pitch)) fail();
      m.start = normalized(p);
    } else {
      Vec2 p;
      std::istringstream fs(first);
      if (!(fs >> p.x) || !(ls >> p.y)) fail();
      m.waypoints.push_back(p);
    }
    std::string rest;
    if (ls >> rest) fail();
  }
  m.validate();
  return m;
}

std::string format_mission(const Mission& m) {
  std::string out = "threshold " + csv::format_number(m.threshold) + "\n";
  out += "timeout " + csv::format_number(m.timeout) + "\n";
  if (m.world_seed) out += "world " + std::to_string(*m.world_seed) + "\n";
  if (m.start) {
    const Pose& p = *m.start;
    out += "start";
    for (double v : {p.x, p.y, p.z, p.yaw, p.pitch}) out += " " + csv::format_number(v);
    out += "\n";
  }
  for (const auto& w : m.waypoints) out += csv::format_number(w.x) + " " + csv::format_number(w.y) + "\n";
  return out;
}

MissionParams MissionParams::from_config(const KeyValueConfig& cfg) {
  MissionParams p;
  p.decoder = net::DecoderConfig::from_config(cfg);
  p.estimator = est::EstimatorConfig::from_config(cfg);
  p.noise = sim::NoiseParams::from_config(cfg);
  p.camera = sim::CameraParams::from_config(cfg);
  p.use_true_pose = cfg.get_bool("mission.use_true_pose", p.use_true_pose);
  return p;
}

std::string to_string(MissionEnd e) {
  switch (e) {
    case MissionEnd::completed:
      return "completed";
    case MissionEnd::collision:
      return "collision";
    case MissionEnd::left_world:
      return "left_world";
    case MissionEnd::timeout:
      break;
  }
  return "timeout";
}

namespace {

/// Tracks the first approach to the active waypoint.
struct ApproachTracker {
  double best = std::numeric_limits<double>::infinity();
  double last = std::numeric_limits<double>::infinity();
  bool settled = false;

  void observe(double d, double threshold, WaypointPass& pass) {
    if (settled) return;
    if (d > last && last < std::numeric_limits<double>::infinity()) {
      settled = true;
      pass.first_pass_distance = best;
      pass.overshoot = best > threshold;
      return;
    }
    best = std::min(best, d);
    last = d;
  }
  void reached(WaypointPass& pass) {
    if (settled) return;
    settled = true;
    pass.first_pass_distance = best;
    pass.overshoot = false;
  }
};

}  // namespace

MissionLog run_mission(const sim::World& world, Policy& policy, const Mission& mission, const sim::RobotState& start,
                       const MissionParams& params, std::uint64_t seed) {
  mission.validate();
  MissionLog log;
  log.policy = policy.name();
  log.waypoints = mission.waypoints;
  Rng sensor_rng = make_rng(seed, 1);
  Rng policy_rng = make_rng(seed, 2);
  sim::SensorModel sensors(params.noise, params.camera);
  est::StateEstimator estimator(params.estimator, start.pose);
  net::ActionDecoder decoder(params.decoder);

  sim::RobotState state = start;
  const auto n = static_cast<int>(mission.waypoints.size());
  int active = 0;
  log.passes.push_back({0, -1, 0.0, false});
  ApproachTracker tracker;
  const int timeout_steps = static_cast<int>(std::ceil(mission.timeout / kControlDt));
  bool done = false;

  for (int step = 0; !done; ++step) {
    const Pose est_pose = estimator.pose(state.pose.pitch);
    const Pose& nav_pose = params.use_true_pose ? state.pose : est_pose;
    while (active < n && (mission.waypoints[active] - nav_pose.planar()).norm() <= mission.threshold) {
      log.passes.back().reached_step = step;
      tracker.reached(log.passes.back());
      ++active;
      ++log.reached;
      if (active < n) {
        log.passes.push_back({step, -1, 0.0, false});
        tracker = ApproachTracker{};
      }
    }
    if (active < n) {
      tracker.observe((mission.waypoints[active] - state.pose.planar()).norm(), mission.threshold, log.passes.back());
    }

    sim::Observation obs;
    try {
      obs = sim::render_observation(world, state.pose, params.camera);
    } catch (const sim::OutOfBoundsError&) {
      log.end = MissionEnd::left_world;
      break;
    }
    StepLog row;
    row.step = step;
    row.true_pose = state.pose;
    row.est_pose = est_pose;
    row.active = active;
    row.coral_fraction = eval::coral_visibility(obs);

    if (active == n) {
      log.end = MissionEnd::completed;
      log.steps.push_back(row);
      break;
    }
    if (step - log.passes.back().activated >= timeout_steps) {
      log.end = MissionEnd::timeout;
      log.steps.push_back(row);
      break;
    }

    const Vec2& wp = mission.waypoints[active];
    row.goal = hindsight::diff(nav_pose, Pose{wp.x, wp.y, 0.0, 0.0, 0.0});
    const ActionHeads heads = policy.act(obs, policy.goal_conditioned() ? std::optional<Vec2>(row.goal) : std::nullopt,
                                         policy_rng);
    row.yaw_expectation = expected_class(heads.yaw);
    row.pitch_expectation = expected_class(heads.pitch);
    log.steps.push_back(row);

    const auto cmd = decoder.decode(heads);
    const sim::RobotState prev = state;
    state = sim::step_dynamics(state, cmd.yaw_rate, cmd.pitch_rate, kControlDt, world.current());
    if (!world.contains(state.pose.x, state.pose.y)) {
      log.end = MissionEnd::left_world;
      break;
    }
    if (world.altitude(state.pose) <= 0.0) {
      ++log.collisions;
      log.end = MissionEnd::collision;
      StepLog last = row;
      last.step = step + 1;
      last.true_pose = state.pose;
      last.est_pose = estimator.pose(state.pose.pitch);
      last.goal = {};
      last.yaw_expectation = last.pitch_expectation = 0.0;
      last.coral_fraction = eval::coral_visibility(sim::render_observation(world, state.pose, params.camera));
      last.collision = true;
      log.steps.push_back(last);
      done = true;
      continue;
    }
    estimator.step(sensors.sense(world, state, prev, sensor_rng), kControlDt);
  }
  return log;
}

csv::Writer mission_log_csv(const MissionLog& log) {
  csv::Writer w({"step", "x", "y", "z", "yaw", "est_x", "est_y", "est_z", "est_yaw", "active", "wp_x",
                 "wp_y", "goal_x", "goal_y", "yaw_expectation", "pitch_expectation", "coral_fraction", "collision"});
  const auto n = static_cast<int>(log.waypoints.size());
  for (const auto& s : log.steps) {
    const Vec2 wp = s.active < n ? log.waypoints[s.active] : log.waypoints.back();
    w.add(s.step).add(s.true_pose.x).add(s.true_pose.y).add(s.true_pose.z).add(s.true_pose.yaw);
    w.add(s.est_pose.x).add(s.est_pose.y).add(s.est_pose.z).add(s.est_pose.yaw);
    w.add(s.active).add(wp.x).add(wp.y).add(s.goal.x).add(s.goal.y);
    w.add(s.yaw_expectation).add(s.pitch_expectation).add(s.coral_fraction).add(s.collision ? 1 : 0);
    w.end_row();
  }
  return w;
}

}  // namespace nav2goal::mission
