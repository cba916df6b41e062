#include "nav2goal/splice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace nav2goal::mission {

void SpliceConfig::validate() const {
  if (eps_position < 0.0 || eps_heading < 0.0) throw std::invalid_argument("splice: tolerances must be non-negative");
  if (!(spacing > 0.0)) throw std::invalid_argument("splice: spacing must be positive");
  if (waypoints <= 0) throw std::invalid_argument("splice: waypoints must be positive");
  if (min_segment_steps < 1) throw std::invalid_argument("splice: min_segment_steps must be at least 1");
  if (!(join_probability >= 0.0 && join_probability <= 1.0)) {
    throw std::invalid_argument("splice: join_probability must lie in [0, 1]");
  }
  if (attempts <= 0) throw std::invalid_argument("splice: attempts must be positive");
}

SpliceConfig SpliceConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  SpliceConfig c;
  c.eps_position = cfg.get_double(prefix + "eps_position", c.eps_position);
  c.eps_heading = deg2rad(cfg.get_double(prefix + "eps_heading_deg", rad2deg(c.eps_heading)));
  c.spacing = cfg.get_double(prefix + "spacing", c.spacing);
  c.waypoints = cfg.get_int(prefix + "waypoints", c.waypoints);
  c.min_segment_steps = cfg.get_int(prefix + "min_segment_steps", c.min_segment_steps);
  c.join_probability = cfg.get_double(prefix + "join_probability", c.join_probability);
  c.attempts = cfg.get_int(prefix + "attempts", c.attempts);
  c.threshold = cfg.get_double("mission.threshold", c.threshold);
  c.timeout = cfg.get_double("mission.timeout", c.timeout);
  c.validate();
  return c;
}

double polyline_length(const std::vector<Vec2>& path) {
  double len = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) len += (path[i] - path[i - 1]).norm();
  return len;
}

std::vector<Vec2> resample_polyline(const std::vector<Vec2>& path, double spacing, int count) {
  std::vector<Vec2> out;
  if (path.size() < 2 || count <= 0) return out;
  double travelled = 0.0;
  double next = spacing;
  for (std::size_t i = 1; i < path.size() && static_cast<int>(out.size()) < count; ++i) {
    const Vec2 a = path[i - 1];
    const Vec2 b = path[i];
    const double seg = (b - a).norm();
    while (seg > 0.0 && travelled + seg >= next - 1e-12 && static_cast<int>(out.size()) < count) {
      const double u = std::clamp((next - travelled) / seg, 0.0, 1.0);
      out.push_back(a + (b - a) * u);
      next += spacing;
    }
    travelled += seg;
  }
  return out;
}

namespace {

struct Ref {
  std::size_t traj;
  int index;
};

class PoseIndex {
 public:
  PoseIndex(const std::vector<hindsight::Trajectory>& store, const std::vector<std::size_t>& members, double cell)
      : store_(store), cell_(cell) {
    for (auto t : members) {
      const auto& recs = store[t].records;
      for (int i = 0; i < static_cast<int>(recs.size()); ++i) {
        cells_[key(recs[static_cast<std::size_t>(i)].true_pose.planar())].push_back({t, i});
      }
    }
  }

  /// Records within the tolerances of pose, excluding the continuation of
  /// (traj, index) itself and donors with fewer than min_steps records left.
  std::vector<Ref> candidates(const Pose& pose, std::size_t traj, int index, const SpliceConfig& c) const {
    std::vector<Ref> out;
    const auto cx = cell_of(pose.x);
    const auto cy = cell_of(pose.y);
    const int reach = static_cast<int>(std::ceil(c.eps_position / cell_));
    for (int dx = -reach; dx <= reach; ++dx) {
      for (int dy = -reach; dy <= reach; ++dy) {
        const auto it = cells_.find(pack(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (const auto& r : it->second) {
          if (r.traj == traj && std::abs(r.index - index) <= c.min_segment_steps) continue;
          const auto& recs = store_[r.traj].records;
          if (r.index + c.min_segment_steps > static_cast<int>(recs.size()) - 1) continue;
          const Pose& q = recs[static_cast<std::size_t>(r.index)].true_pose;
          if ((q.planar() - pose.planar()).norm() > c.eps_position) continue;
          if (std::abs(wrap_angle(q.yaw - pose.yaw)) > c.eps_heading) continue;
          out.push_back(r);
        }
      }
    }
    return out;
  }

 private:
  long long cell_of(double v) const { return static_cast<long long>(std::floor(v / cell_)); }
  static long long pack(long long x, long long y) { return (x << 32) ^ (y & 0xffffffffLL); }
  long long key(const Vec2& p) const { return pack(cell_of(p.x), cell_of(p.y)); }

  const std::vector<hindsight::Trajectory>& store_;
  double cell_;
  std::unordered_map<long long, std::vector<Ref>> cells_;
};

}  // namespace

SplicedMission splice_waypoints(const std::vector<hindsight::Trajectory>& store, const SpliceConfig& config,
                                Rng& rng) {
  config.validate();
  std::map<std::uint64_t, std::vector<std::size_t>> groups;
  std::vector<std::size_t> eligible;
  for (std::size_t t = 0; t < store.size(); ++t) {
    if (store[t].collision || static_cast<int>(store[t].length()) < config.min_segment_steps + 1) continue;
    groups[store[t].seed].push_back(t);
    eligible.push_back(t);
  }
  if (eligible.empty()) throw std::invalid_argument("splice: store has no usable trajectories");

  const double cell = std::max(config.eps_position, 0.25);
  std::map<std::uint64_t, PoseIndex> indices;
  for (const auto& [seed, members] : groups) indices.emplace(seed, PoseIndex(store, members, cell));

  const double need = config.spacing * config.waypoints;
  SplicedMission best;
  best.path_length = -1.0;
  for (int attempt = 0; attempt < config.attempts; ++attempt) {
    std::size_t cur = eligible[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(eligible.size()) - 1))];
    const auto& index = indices.at(store[cur].seed);
    const int len0 = static_cast<int>(store[cur].length());
    int seg_begin = uniform_int(rng, 0, std::max(0, len0 - 1 - config.min_segment_steps));
    int i = seg_begin;
    std::vector<Segment> segments;
    std::vector<Vec2> path{store[cur].records[static_cast<std::size_t>(i)].true_pose.planar()};
    double length = 0.0;

    auto join = [&](const std::vector<Ref>& cands) {
      const Ref pick = cands[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(cands.size()) - 1))];
      segments.push_back({cur, seg_begin, i});
      cur = pick.traj;
      seg_begin = i = pick.index;
      const Vec2 p = store[cur].records[static_cast<std::size_t>(i)].true_pose.planar();
      length += (p - path.back()).norm();
      path.push_back(p);
    };

    while (length < need) {
      const auto& recs = store[cur].records;
      const bool may_join = i - seg_begin >= config.min_segment_steps;
      if (i + 1 < static_cast<int>(recs.size())) {
        ++i;
        const Vec2 p = recs[static_cast<std::size_t>(i)].true_pose.planar();
        length += (p - path.back()).norm();
        path.push_back(p);
        if (length >= need) break;
        if (i - seg_begin >= config.min_segment_steps && uniform01(rng) < config.join_probability) {
          const auto cands = index.candidates(recs[static_cast<std::size_t>(i)].true_pose, cur, i, config);
          if (!cands.empty()) join(cands);
        }
      } else {
        if (!may_join) break;
        const auto cands = index.candidates(recs[static_cast<std::size_t>(i)].true_pose, cur, i, config);
        if (cands.empty()) break;
        join(cands);
      }
    }
    segments.push_back({cur, seg_begin, i});
    if (length > best.path_length) {
      best = SplicedMission{};
      best.segments = std::move(segments);
      best.path = std::move(path);
      best.path_length = length;
      if (length >= need) break;
    }
  }

  const auto& first = best.segments.front();
  best.world_seed = store[first.trajectory].seed;
  best.start = hindsight::record_state(store[first.trajectory].records[static_cast<std::size_t>(first.begin)], {});
  best.mission.threshold = config.threshold;
  best.mission.timeout = config.timeout;
  best.mission.world_seed = best.world_seed;
  best.mission.start = best.start.pose;
  best.mission.waypoints = resample_polyline(best.path, config.spacing, config.waypoints);
  best.complete = static_cast<int>(best.mission.waypoints.size()) == config.waypoints;
  if (!best.complete) {
    std::ostringstream msg;
    msg << "splice: longest chain is " << best.path_length << " m, " << best.mission.waypoints.size() << " of "
        << config.waypoints << " waypoints";
    best.warning = msg.str();
  }
  return best;
}

namespace {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.x * ab.x + ab.y * ab.y;
  if (l2 == 0.0) return (p - a).norm();
  const double u = std::clamp(((p.x - a.x) * ab.x + (p.y - a.y) * ab.y) / l2, 0.0, 1.0);
  return (p - (a + ab * u)).norm();
}

}  // namespace

ReplayResult replay_spliced(const std::vector<hindsight::Trajectory>& store, const SplicedMission& spliced,
                            const sim::RobotState& limits, const sim::World* world) {
  ReplayResult out;
  const Vec2 current = world ? world->current() : Vec2{};
  std::vector<std::vector<Vec2>> pieces;
  for (const auto& seg : spliced.segments) {
    const auto& recs = store.at(seg.trajectory).records;
    if (seg.begin < 0 || seg.end >= static_cast<int>(recs.size()) || seg.begin > seg.end) {
      throw std::out_of_range("replay_spliced: segment outside its trajectory");
    }
    sim::RobotState state = hindsight::record_state(recs[static_cast<std::size_t>(seg.begin)], limits);
    std::vector<Vec2> piece{state.pose.planar()};
    for (int k = seg.begin; k < seg.end; ++k) {
      const auto& cmd = recs[static_cast<std::size_t>(k)].command;
      state = sim::step_dynamics(state, cmd.x, cmd.y, kControlDt, current);
      if (world && world->altitude(state.pose) <= 0.0) out.collision = true;
      piece.push_back(state.pose.planar());
    }
    out.path.insert(out.path.end(), piece.begin(), piece.end());
    pieces.push_back(std::move(piece));
  }
  for (const auto& wp : spliced.mission.waypoints) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& piece : pieces) {
      if (piece.size() == 1) best = std::min(best, (wp - piece[0]).norm());
      for (std::size_t i = 1; i < piece.size(); ++i) best = std::min(best, point_segment_distance(wp, piece[i - 1], piece[i]));
    }
    out.waypoint_distance.push_back(best);
    out.max_distance = std::max(out.max_distance, best);
  }
  return out;
}

}  // namespace nav2goal::mission
