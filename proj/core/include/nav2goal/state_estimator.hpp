#pragma once

#include <optional>

#include "nav2goal/config.hpp"
#include "nav2goal/csv.hpp"
#include "nav2goal/ekf.hpp"
#include "nav2goal/scale_estimator.hpp"
#include "nav2goal/sensors.hpp"

namespace nav2goal::est {

struct EstimatorConfig {
  EkfNoise noise;
  double speed_prior = 0.41;
  int scale_horizon = 10;
  double aperture = deg2rad(30.0);
  bool use_odometry = true;
  /// Initial standard deviations of position and yaw.
  double initial_position_std = 0.01;
  double initial_yaw_std = 0.01;

  static EstimatorConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "estimator.");
};

struct StepTrace {
  bool odometry_used = false;
  bool compass_outlier = false;
  bool depth_outlier = false;
  bool odometry_outlier = false;
  bool scale_updated = false;
};

/// Per-step fusion: predict with gyro and the speed prior, update compass and
/// depth, refresh the sonar scale, then fuse scaled odometry when it is available.
class StateEstimator {
 public:
  StateEstimator(EstimatorConfig config, const Pose& start);

  StepTrace step(const sim::SensorBundle& sensors, double dt);

  /// Estimated pose; pitch is not estimated and is taken from the caller.
  Pose pose(double pitch = 0.0) const;
  const EkfState& state() const { return state_; }
  std::optional<double> scale() const { return scale_.smoothed(); }
  const ScaleEstimator& scale_estimator() const { return scale_; }
  double time() const { return time_; }

  static csv::Writer trace_writer();
  void append_trace(csv::Writer& w) const;

 private:
  EstimatorConfig config_;
  EkfState state_;
  ScaleEstimator scale_;
  double time_ = 0.0;
};

}  // namespace nav2goal::est
