#include "nav2goal/metrics.hpp"

#include <cmath>

namespace nav2goal::eval {

double coral_visibility(const sim::Observation& obs) {
  const double total = static_cast<double>(obs.cell_class.size()) + obs.down_ray_count;
  if (total <= 0.0) return 0.0;
  return (obs.count(sim::ViewClass::coral) + obs.down_coral_hits) / total;
}

std::vector<double> cumulative_mean(const std::vector<double>& series) {
  std::vector<double> out;
  out.reserve(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += series[i];
    out.push_back(sum / static_cast<double>(i + 1));
  }
  return out;
}

namespace {

void finish(TrialResult& r) {
  r.coral_sum = 0.0;
  for (double v : r.coral_series) r.coral_sum += v;
  r.steps = static_cast<int>(r.coral_series.size());
  r.cumulative_coral = r.steps ? r.coral_sum / r.steps : 0.0;
}

}  // namespace

TrialResult trial_result(int trial, const mission::MissionLog& log) {
  TrialResult r;
  r.trial = trial;
  r.policy = log.policy;
  for (const auto& s : log.steps) r.coral_series.push_back(s.coral_fraction);
  r.waypoints_total = static_cast<int>(log.waypoints.size());
  r.waypoints_reached = log.reached;
  r.collisions = log.collisions;
  if (log.completed() && !log.passes.empty()) r.steps_to_completion = log.passes.back().reached_step;
  finish(r);
  return r;
}

TrialResult trial_from_csv(int trial, const std::string& policy, int waypoints_total, const csv::Table& table) {
  TrialResult r;
  r.trial = trial;
  r.policy = policy;
  r.waypoints_total = waypoints_total;
  int last_active = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    r.coral_series.push_back(table.number(i, "coral_fraction"));
    r.collisions += static_cast<int>(table.number(i, "collision"));
    last_active = static_cast<int>(table.number(i, "active"));
    if (last_active == waypoints_total && r.steps_to_completion < 0) {
      r.steps_to_completion = static_cast<int>(table.number(i, "step"));
    }
  }
  r.waypoints_reached = last_active;
  finish(r);
  return r;
}

}  // namespace nav2goal::eval
