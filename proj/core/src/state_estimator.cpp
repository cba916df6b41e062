#include "nav2goal/state_estimator.hpp"

namespace nav2goal::est {

EstimatorConfig EstimatorConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  EstimatorConfig c;
  c.noise = EkfNoise::from_config(cfg, prefix);
  c.speed_prior = cfg.get_double(prefix + "speed_prior", c.speed_prior);
  c.scale_horizon = cfg.get_int(prefix + "scale_horizon", c.scale_horizon);
  c.aperture = deg2rad(cfg.get_double(prefix + "aperture_deg", rad2deg(c.aperture)));
  c.use_odometry = cfg.get_bool(prefix + "use_odometry", c.use_odometry);
  c.initial_position_std = cfg.get_double(prefix + "initial_position_std", c.initial_position_std);
  c.initial_yaw_std = cfg.get_double(prefix + "initial_yaw_std", c.initial_yaw_std);
  return c;
}

StateEstimator::StateEstimator(EstimatorConfig config, const Pose& start)
    : config_(config), scale_(config.scale_horizon, config.aperture) {
  state_.mean = Vector4(start.x, start.y, start.z, start.yaw);
  state_.speed_prior = config_.speed_prior;
  const double p = config_.initial_position_std * config_.initial_position_std;
  const double y = config_.initial_yaw_std * config_.initial_yaw_std;
  state_.cov = Vector4(p, p, p, y).asDiagonal();
}

StepTrace StateEstimator::step(const sim::SensorBundle& s, double dt) {
  StepTrace trace;
  const Vector4 anchor = state_.mean;
  state_ = ekf_predict(state_, s.gyro_yaw_rate, dt, process_noise(config_.noise, dt));
  time_ += dt;
  trace.compass_outlier = !update_compass(state_, s.compass_yaw, config_.noise.r_compass).accepted;
  trace.depth_outlier = !update_depth(state_, s.depth_meas, config_.noise.r_depth).accepted;
  if (!s.dropout_flag && s.sonar_valid) trace.scale_updated = scale_.update(s.point_cloud, s.sonar_range);
  const auto scale = scale_.smoothed();
  if (config_.use_odometry && !s.dropout_flag && scale) {
    const Vec2 v{s.odom_translation.x / *scale / dt, s.odom_translation.y / *scale / dt};
    const auto r = update_odometry(state_, v, anchor, dt, config_.noise.r_odometry);
    trace.odometry_used = r.accepted;
    trace.odometry_outlier = !r.accepted;
  }
  return trace;
}

Pose StateEstimator::pose(double pitch) const {
  return normalized({state_.mean(kX), state_.mean(kY), state_.mean(kZ), state_.mean(kYaw), pitch});
}

csv::Writer StateEstimator::trace_writer() {
  return csv::Writer({"t", "x", "y", "z", "yaw", "var_x", "var_y", "var_z", "var_yaw", "scale"});
}

void StateEstimator::append_trace(csv::Writer& w) const {
  w.add(time_);
  for (int i = 0; i < 4; ++i) w.add(state_.mean(i));
  for (int i = 0; i < 4; ++i) w.add(state_.cov(i, i));
  w.add(scale().value_or(0.0));
  w.end_row();
}

}  // namespace nav2goal::est
