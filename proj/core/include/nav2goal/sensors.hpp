#pragma once

#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/dynamics.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::sim {

struct NoiseParams {
  double compass_std = 0.02;
  double gyro_std = 0.005;
  double depth_std = 0.02;
  double sonar_std = 0.03;
  /// Sonar beam half-angle.
  double sonar_aperture = deg2rad(30.0);
  /// Relative range noise on each odometry point.
  double point_noise = 0.01;
  /// Relative noise on each odometry translation component.
  double odom_noise = 0.02;
  int cloud_points = 160;
  /// Probability of a spontaneous odometry failure per step.
  double dropout_prob = 0.02;
  bool sand_dropout = true;
  /// Down-camera sand fraction at or above which odometry loses tracking.
  double sand_dropout_fraction = 0.9;
  /// Hidden odometry-to-world scale at episode start, and its log random-walk step.
  double initial_scale = 1.0;
  double scale_drift = 0.001;

  static NoiseParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "noise.");
  static NoiseParams noiseless();
};

struct SensorBundle {
  double compass_yaw = 0.0;
  double gyro_yaw_rate = 0.0;
  double depth_meas = 0.0;
  /// Beam-averaged slant range; 0 with sonar_valid false when no terrain is in range.
  double sonar_range = 0.0;
  bool sonar_valid = false;
  double sonar_aperture = 0.0;
  /// Odometry keyframe point cloud in the down-camera frame (x forward, y right,
  /// z along the optical axis), in odometry units.
  std::vector<Vec3> point_cloud;
  /// Relative translation since the previous step, previous body frame
  /// (x forward, y left, z up), odometry units.
  Vec3 odom_translation{};
  bool dropout_flag = false;
  /// Ground-truth scale, for diagnostics only.
  double true_scale = 1.0;
};

/// Synthetic compass, gyro, depth, single-beam sonar and a scale-ambiguous
/// monocular odometry source looking through the downward camera.
class SensorModel {
 public:
  SensorModel(NoiseParams noise = {}, CameraParams camera = {});

  SensorBundle sense(const World& world, const RobotState& state, const RobotState& prev_state, Rng& rng);

  double hidden_scale() const { return scale_; }
  void set_hidden_scale(double s) { scale_ = s; }
  const NoiseParams& noise() const { return noise_; }

  /// Mean slant range over the sonar cone, evaluated with a fixed ray pattern.
  double beam_range(const World& world, const Pose& pose) const;

 private:
  NoiseParams noise_;
  CameraParams camera_;
  double scale_;
  std::vector<Vec3> beam_pattern_;
};

}  // namespace nav2goal::sim
