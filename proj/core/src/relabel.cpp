#include "nav2goal/relabel.hpp"

#include <algorithm>
#include <stdexcept>

namespace nav2goal::hindsight {

Vec2 diff(const Pose& a, const Pose& b) { return rotate(b.planar() - a.planar(), -a.yaw); }

RelabelConfig RelabelConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  RelabelConfig c;
  c.tau = cfg.get_int(prefix + "tau", c.tau);
  const auto source = cfg.get_string(prefix + "poses", "estimated");
  if (source == "estimated") {
    c.poses = PoseSource::estimated;
  } else if (source == "truth") {
    c.poses = PoseSource::truth;
  } else {
    throw ConfigError(prefix + "poses must be 'estimated' or 'truth'");
  }
  if (c.tau < 1) throw ConfigError(prefix + "tau must be at least 1");
  return c;
}

RelabelSampler::RelabelSampler(const std::vector<Trajectory>& store, RelabelConfig config,
                               const std::vector<std::size_t>* subset)
    : store_(&store), config_(config) {
  if (config_.tau < 1) throw std::invalid_argument("relabel: tau must be at least 1");
  auto consider = [&](std::size_t i) {
    const auto len = store[i].length();
    if (len < 2) return;
    total_ += len - 1;
    traj_.push_back(i);
    cumulative_.push_back(total_);
  };
  if (subset) {
    for (auto i : *subset) consider(i);
  } else {
    for (std::size_t i = 0; i < store.size(); ++i) consider(i);
  }
}

GoalSample RelabelSampler::draw(Rng& rng) const {
  if (total_ == 0) throw std::runtime_error("relabel: no trajectory with at least two records");
  const auto k = std::uniform_int_distribution<std::size_t>(0, total_ - 1)(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), k);
  const auto slot = static_cast<std::size_t>(it - cumulative_.begin());
  const std::size_t before = slot == 0 ? 0 : cumulative_[slot - 1];
  const Trajectory& traj = (*store_)[traj_[slot]];
  const int t = static_cast<int>(k - before);
  const int last = static_cast<int>(traj.length()) - 1;
  const int dt = uniform_int(rng, 1, std::min(config_.tau, last - t));
  const auto& rec = traj.records[static_cast<std::size_t>(t)];
  const auto& future = traj.records[static_cast<std::size_t>(t + dt)];
  GoalSample s;
  s.observation = &rec.observation;
  s.goal = diff(pose_of(rec, config_.poses), pose_of(future, config_.poses));
  s.label = rec.action;
  s.trajectory_id = traj.id;
  s.trajectory_index = traj_[slot];
  s.t = t;
  s.dt = dt;
  return s;
}

std::vector<GoalSample> RelabelSampler::draw_batch(std::size_t n, Rng& rng) const {
  std::vector<GoalSample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(draw(rng));
  return out;
}

std::vector<GoalSample> relabel_batch(const std::vector<Trajectory>& store, std::size_t batch_size,
                                      const RelabelConfig& config, Rng& rng) {
  if (store.empty()) throw std::invalid_argument("relabel_batch: empty store");
  return RelabelSampler(store, config).draw_batch(batch_size, rng);
}

net::Example to_example(const GoalSample& s) { return {s.observation, s.goal, s.label}; }

RelabelBatchSource::RelabelBatchSource(const RelabelSampler& sampler, std::size_t samples_per_epoch)
    : sampler_(&sampler), per_epoch_(samples_per_epoch) {}

std::vector<net::Example> RelabelBatchSource::next_batch(std::size_t n, Rng& rng) {
  const std::size_t take = std::min(n, per_epoch_ - drawn_);
  std::vector<net::Example> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(to_example(sampler_->draw(rng)));
  drawn_ += take;
  return out;
}

}  // namespace nav2goal::hindsight
