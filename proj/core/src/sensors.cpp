#include "nav2goal/sensors.hpp"

#include <algorithm>

namespace nav2goal::sim {

NoiseParams NoiseParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  NoiseParams n;
  n.compass_std = cfg.get_double(prefix + "compass_std", n.compass_std);
  n.gyro_std = cfg.get_double(prefix + "gyro_std", n.gyro_std);
  n.depth_std = cfg.get_double(prefix + "depth_std", n.depth_std);
  n.sonar_std = cfg.get_double(prefix + "sonar_std", n.sonar_std);
  n.sonar_aperture = deg2rad(cfg.get_double(prefix + "sonar_aperture_deg", rad2deg(n.sonar_aperture)));
  n.point_noise = cfg.get_double(prefix + "point_noise", n.point_noise);
  n.odom_noise = cfg.get_double(prefix + "odom_noise", n.odom_noise);
  n.cloud_points = cfg.get_int(prefix + "cloud_points", n.cloud_points);
  n.dropout_prob = cfg.get_double(prefix + "dropout_prob", n.dropout_prob);
  n.sand_dropout = cfg.get_bool(prefix + "sand_dropout", n.sand_dropout);
  n.sand_dropout_fraction = cfg.get_double(prefix + "sand_dropout_fraction", n.sand_dropout_fraction);
  n.initial_scale = cfg.get_double(prefix + "initial_scale", n.initial_scale);
  n.scale_drift = cfg.get_double(prefix + "scale_drift", n.scale_drift);
  return n;
}

NoiseParams NoiseParams::noiseless() {
  NoiseParams n;
  n.compass_std = 0.0;
  n.gyro_std = 0.0;
  n.depth_std = 0.0;
  n.sonar_std = 0.0;
  n.point_noise = 0.0;
  n.odom_noise = 0.0;
  n.dropout_prob = 0.0;
  n.scale_drift = 0.0;
  return n;
}

SensorModel::SensorModel(NoiseParams noise, CameraParams camera)
    : noise_(noise), camera_(camera), scale_(noise.initial_scale) {
  constexpr int kGrid = 21;
  const double t = std::tan(noise_.sonar_aperture);
  const double cos_limit = std::cos(noise_.sonar_aperture);
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double u = -t + (i + 0.5) * 2.0 * t / kGrid;
      const double v = -t + (j + 0.5) * 2.0 * t / kGrid;
      const Vec3 d{u, v, 1.0};
      if (d.z / d.norm() >= cos_limit) beam_pattern_.push_back(d * (1.0 / d.norm()));
    }
  }
}

namespace {

/// Down-camera frame (x forward, y right, z optical axis) to world (z down).
Vec3 camera_to_world(const Vec3& c, const Pose& pose) {
  return body_to_world(c.x, -c.y, -c.z, pose.yaw, pose.pitch);
}

}  // namespace

double SensorModel::beam_range(const World& world, const Pose& pose) const {
  const Vec3 origin{pose.x, pose.y, pose.z};
  double sum = 0.0;
  int hits = 0;
  for (const auto& d : beam_pattern_) {
    const Vec3 dir = camera_to_world(d, pose);
    if (auto hit = world.cast_ray(origin, dir, camera_.range_max)) {
      sum += hit->distance;
      ++hits;
    }
  }
  return hits > 0 ? sum / hits : 0.0;
}

SensorBundle SensorModel::sense(const World& world, const RobotState& state, const RobotState& prev_state,
                                Rng& rng) {
  SensorBundle out;
  const Pose& pose = state.pose;
  out.compass_yaw = wrap_angle(pose.yaw + gaussian(rng, noise_.compass_std));
  out.gyro_yaw_rate = state.yaw_rate + gaussian(rng, noise_.gyro_std);
  out.depth_meas = pose.z + gaussian(rng, noise_.depth_std);
  out.sonar_aperture = noise_.sonar_aperture;

  const double range = beam_range(world, pose);
  if (range > 0.0) {
    out.sonar_range = std::max(1e-3, range + gaussian(rng, noise_.sonar_std));
    out.sonar_valid = true;
  }

  if (noise_.scale_drift > 0.0) scale_ *= std::exp(gaussian(rng, noise_.scale_drift));
  out.true_scale = scale_;

  const Vec3 origin{pose.x, pose.y, pose.z};
  const int n = camera_.down_rays;
  const double step = camera_.down_fov / n;
  int sand = 0;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double a = -camera_.down_fov / 2.0 + (i + 0.5) * step;
      const double b = -camera_.down_fov / 2.0 + (j + 0.5) * step;
      Vec3 dir = camera_to_world({std::tan(a), std::tan(b), 1.0}, pose);
      dir = dir * (1.0 / dir.norm());
      if (auto hit = world.cast_ray(origin, dir, camera_.range_max)) {
        ++hits;
        if (hit->surface == SurfaceClass::sand) ++sand;
      }
    }
  }
  const double sand_fraction = static_cast<double>(sand) / static_cast<double>(n * n);
  const bool spontaneous = bernoulli(rng, noise_.dropout_prob);
  const bool featureless = hits == 0 || (noise_.sand_dropout && sand_fraction >= noise_.sand_dropout_fraction);
  out.dropout_flag = spontaneous || featureless;
  if (out.dropout_flag) return out;

  const double half = std::tan(camera_.down_fov / 2.0);
  out.point_cloud.reserve(static_cast<std::size_t>(noise_.cloud_points));
  for (int k = 0; k < noise_.cloud_points; ++k) {
    Vec3 c{uniform(rng, -half, half), uniform(rng, -half, half), 1.0};
    c = c * (1.0 / c.norm());
    const double jitter = 1.0 + gaussian(rng, noise_.point_noise);
    if (auto hit = world.cast_ray(origin, camera_to_world(c, pose), camera_.range_max)) {
      out.point_cloud.push_back(c * (scale_ * hit->distance * jitter));
    }
  }
  if (out.point_cloud.empty()) {
    out.dropout_flag = true;
    return out;
  }

  const Vec2 planar = rotate(pose.planar() - prev_state.pose.planar(), -prev_state.pose.yaw);
  const double up = prev_state.pose.z - pose.z;
  out.odom_translation = {scale_ * planar.x * (1.0 + gaussian(rng, noise_.odom_noise)),
                          scale_ * planar.y * (1.0 + gaussian(rng, noise_.odom_noise)),
                          scale_ * up * (1.0 + gaussian(rng, noise_.odom_noise))};
  return out;
}

}  // namespace nav2goal::sim
