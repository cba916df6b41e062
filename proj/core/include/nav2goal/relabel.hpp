#pragma once

#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/trainer.hpp"
#include "nav2goal/trajectory.hpp"

namespace nav2goal::hindsight {

/// Planar displacement of b relative to a, in a's heading frame. Depth is ignored.
Vec2 diff(const Pose& a, const Pose& b);

enum class PoseSource { estimated, truth };

struct RelabelConfig {
  /// Largest allowed step gap between the current and the goal record.
  int tau = 40;
  PoseSource poses = PoseSource::estimated;

  static RelabelConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "relabel.");
};

struct GoalSample {
  const sim::Observation* observation = nullptr;
  /// Robot-frame goal in metres.
  Vec2 goal{};
  ActionLabel label;
  std::uint32_t trajectory_id = 0;
  /// Position of the trajectory in the store.
  std::size_t trajectory_index = 0;
  int t = 0;
  int dt = 0;
};

inline const Pose& pose_of(const TrajectoryRecord& r, PoseSource s) {
  return s == PoseSource::truth ? r.true_pose : r.est_pose;
}

/// Uniform sampler over eligible (trajectory, t) pairs; t ranges over 0..T-1
/// where T is the index of the trajectory's last record. Trajectories with
/// fewer than two records are skipped.
class RelabelSampler {
 public:
  RelabelSampler(const std::vector<Trajectory>& store, RelabelConfig config,
                 const std::vector<std::size_t>* subset = nullptr);

  std::size_t eligible_pairs() const { return total_; }
  GoalSample draw(Rng& rng) const;
  std::vector<GoalSample> draw_batch(std::size_t n, Rng& rng) const;

 private:
  const std::vector<Trajectory>* store_;
  RelabelConfig config_;
  std::vector<std::size_t> traj_;
  std::vector<std::size_t> cumulative_;
  std::size_t total_ = 0;
};

std::vector<GoalSample> relabel_batch(const std::vector<Trajectory>& store, std::size_t batch_size,
                                      const RelabelConfig& config, Rng& rng);

net::Example to_example(const GoalSample& s);

/// Minibatches drawn fresh from the sampler on every request.
class RelabelBatchSource : public net::BatchSource {
 public:
  RelabelBatchSource(const RelabelSampler& sampler, std::size_t samples_per_epoch);
  std::size_t epoch_size() const override { return per_epoch_; }
  void start_epoch(Rng&) override { drawn_ = 0; }
  std::vector<net::Example> next_batch(std::size_t n, Rng& rng) override;

 private:
  const RelabelSampler* sampler_;
  std::size_t per_epoch_;
  std::size_t drawn_ = 0;
};

}  // namespace nav2goal::hindsight
