#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nav2goal/csv.hpp"
#include "nav2goal/metrics.hpp"
#include "nav2goal/run_config.hpp"

namespace nav2goal::pipeline {

class PipelineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Artifact names inside the output directory.
namespace artifact {
inline constexpr const char* kWorlds = "worlds.csv";
inline constexpr const char* kBcDataset = "bc_dataset.n2gt";
inline constexpr const char* kBcPolicy = "bc_policy.ckpt";
inline constexpr const char* kBcTraining = "bc_training.csv";
inline constexpr const char* kExploreDataset = "explore_dataset.n2gt";
inline constexpr const char* kGcPolicy = "gc_policy.ckpt";
inline constexpr const char* kGcTraining = "gc_training.csv";
inline constexpr const char* kGcConcatPolicy = "gc_concat_policy.ckpt";
inline constexpr const char* kFusionAblation = "fusion_ablation.csv";
inline constexpr const char* kMissionDir = "missions";
inline constexpr const char* kSpliceReport = "missions/splice.csv";
inline constexpr const char* kMissionSummary = "missions/summary.csv";
inline constexpr const char* kCompareDir = "compare";
inline constexpr const char* kCompareTrials = "compare/trials.csv";
inline constexpr const char* kCompareSummary = "compare/summary.csv";
inline constexpr const char* kCompareCoral = "compare/cumulative_coral.svg";
inline constexpr const char* kComparePaths = "compare/paths.svg";
}  // namespace artifact

std::vector<std::uint64_t> world_seeds(const RunConfig& cfg);
std::vector<sim::World> make_worlds(const RunConfig& cfg);

struct TrainedPolicy {
  net::PolicyNetwork net;
  net::TrainReport report;
};

std::vector<hindsight::Trajectory> collect_bc(const RunConfig& cfg, const std::vector<sim::World>& worlds);
TrainedPolicy train_bc(const RunConfig& cfg, const std::vector<hindsight::Trajectory>& dataset);
std::vector<hindsight::Trajectory> collect_explore(const RunConfig& cfg, const std::vector<sim::World>& worlds,
                                                   const net::PolicyNetwork& behaviour);
/// Hindsight-relabeled training; warm, when given, seeds every matching layer.
TrainedPolicy train_gc(const RunConfig& cfg, const std::vector<hindsight::Trajectory>& dataset,
                       const net::PolicyNetwork* warm, net::GoalFusion fusion);

/// Goals on a circle around the robot, evenly spaced in bearing.
std::vector<Vec2> goal_sweep(double radius, int count);
/// Mean over observations of the variance of the yaw expectation across the
/// goal sweep (dropout off).
double goal_sensitivity(const net::PolicyNetwork& net, std::span<const sim::Observation* const> observations,
                        const std::vector<Vec2>& sweep);
/// Up to count observations spread evenly through the dataset.
std::vector<const sim::Observation*> probe_observations(const std::vector<hindsight::Trajectory>& dataset,
                                                        std::size_t count);

struct FusionAblation {
  double multiply = 0.0;
  double concatenate = 0.0;
};
csv::Writer fusion_ablation_csv(const FusionAblation& a);

std::vector<mission::SplicedMission> splice_missions(const RunConfig& cfg,
                                                     const std::vector<hindsight::Trajectory>& store);
csv::Writer splice_report_csv(const std::vector<mission::SplicedMission>& missions,
                              const std::vector<mission::ReplayResult>& replays);

/// Runs each spliced mission with the policy in its donor world.
std::vector<mission::MissionLog> run_missions(const RunConfig& cfg,
                                              const std::vector<mission::SplicedMission>& missions,
                                              mission::Policy& policy);
csv::Writer mission_summary_csv(const std::vector<mission::MissionLog>& logs);

struct PolicySummary {
  std::string policy;
  double mean_cumulative_coral = 0.0;
  double mean_coral_sum = 0.0;
  double reach_rate = 0.0;
  /// Mean steps to completion over trials both policies completed.
  double mean_steps_paired = 0.0;
  double mean_steps = 0.0;
  int collisions = 0;
};

struct CompareReport {
  std::vector<mission::MissionLog> gc_logs;
  std::vector<mission::MissionLog> greedy_logs;
  std::vector<eval::TrialResult> gc;
  std::vector<eval::TrialResult> greedy;
  PolicySummary gc_summary;
  PolicySummary greedy_summary;
  int paired_completions = 0;
  std::vector<Vec2> starts;
  std::vector<Vec2> goals;

  double coral_margin() const { return gc_summary.mean_cumulative_coral - greedy_summary.mean_cumulative_coral; }
  double time_ratio() const;
};

/// Paired trials on obstacle-free, low-relief worlds: both policies share the
/// world, start, goal and noise streams of each trial.
CompareReport compare_policies(const RunConfig& cfg, const net::PolicyNetwork& gc);
PolicySummary summarize(const std::string& policy, const std::vector<eval::TrialResult>& trials,
                        const std::vector<eval::TrialResult>& other);
csv::Writer compare_trials_csv(const CompareReport& r);
csv::Writer compare_summary_csv(const CompareReport& r);
std::string compare_coral_svg(const CompareReport& r);
std::string compare_paths_svg(const CompareReport& r, int max_trials = 6);

csv::Writer training_log_csv(const net::TrainReport& report);

/// Path plot of a mission log CSV (true and estimated tracks, waypoints).
std::string mission_log_svg(const csv::Table& table, const std::string& title);

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"gen-world", "collect-bc", "train-bc", "collect-explore", "train-gc",
                                              "splice",    "run-mission", "compare",  "plot"};
  return names;
}

/// Executes one pipeline command against cfg.out_dir. Returns the process exit
/// code: 0 on success, 3 when a run invariant fails. Missing inputs raise
/// PipelineError naming the artifact.
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log);

}  // namespace nav2goal::pipeline
