#pragma once

#include <string>
#include <vector>

#include "nav2goal/csv.hpp"
#include "nav2goal/mission.hpp"
#include "nav2goal/observation.hpp"

namespace nav2goal::eval {

/// (coral forward cells + coral down rays) / (forward cells + down rays).
double coral_visibility(const sim::Observation& obs);

struct TrialResult {
  int trial = 0;
  std::string policy;
  std::vector<double> coral_series;
  /// Running mean of the per-step coral fraction at the final step.
  double cumulative_coral = 0.0;
  double coral_sum = 0.0;
  int waypoints_reached = 0;
  int waypoints_total = 0;
  /// Steps until the last waypoint was reached, or -1.
  int steps_to_completion = -1;
  int steps = 0;
  int collisions = 0;

  bool reached_goal() const { return waypoints_total > 0 && waypoints_reached == waypoints_total; }
};

TrialResult trial_result(int trial, const mission::MissionLog& log);
/// Rebuilds a TrialResult from a mission log CSV.
TrialResult trial_from_csv(int trial, const std::string& policy, int waypoints_total, const csv::Table& table);

/// Running mean of a series.
std::vector<double> cumulative_mean(const std::vector<double>& series);

}  // namespace nav2goal::eval
