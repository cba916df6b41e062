#pragma once

#include <Eigen/Dense>

#include "nav2goal/config.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::est {

using Vector4 = Eigen::Vector4d;
using Matrix4 = Eigen::Matrix4d;

enum StateIndex { kX = 0, kY = 1, kZ = 2, kYaw = 3 };

/// Planar position, depth and yaw with a 4x4 covariance.
struct EkfState {
  Vector4 mean = Vector4::Zero();
  Matrix4 cov = Matrix4::Identity() * 1e-4;
  /// Constant forward speed prior (m/s).
  double speed_prior = 0.41;
};

struct EkfNoise {
  /// Process noise spectral densities (per second).
  double q_position = 0.02;
  double q_yaw = 0.001;
  double r_compass = 0.01;
  double r_depth = 0.01;
  double r_odometry = 0.005;

  static EkfNoise from_config(const KeyValueConfig& cfg, const std::string& prefix = "estimator.");
};

/// Chi-square 99th percentile for 1 and 2 degrees of freedom.
inline constexpr double kChi2Gate1 = 6.634896601021214;
inline constexpr double kChi2Gate2 = 9.210340371976184;

struct UpdateResult {
  bool accepted = true;
  /// Normalized innovation squared.
  double nis = 0.0;
};

Matrix4 process_noise(const EkfNoise& noise, double dt);

/// Advances the mean by speed_prior * dt along yaw and yaw by gyro * dt.
EkfState ekf_predict(const EkfState& state, double gyro, double dt, const Matrix4& q);

/// Generic measurement update with Joseph-form covariance and a chi-square gate.
/// wrap_rows lists innovation rows that are angles. Throws std::invalid_argument
/// when R is not positive definite.
template <int M>
UpdateResult ekf_update(EkfState& state, const Eigen::Matrix<double, M, 1>& z,
                        const Eigen::Matrix<double, M, 1>& predicted, const Eigen::Matrix<double, M, 4>& h,
                        const Eigen::Matrix<double, M, M>& r, double gate, int wrap_row = -1);

UpdateResult update_compass(EkfState& state, double yaw_meas, double r, double gate = kChi2Gate1);
UpdateResult update_depth(EkfState& state, double depth_meas, double r, double gate = kChi2Gate1);
/// Body-frame planar velocity measured relative to an anchor pose:
/// h(x) = R(-yaw_anchor) (p - p_anchor) / dt.
UpdateResult update_odometry(EkfState& state, const Vec2& body_velocity, const Vector4& anchor, double dt, double r,
                             double gate = kChi2Gate2);

bool is_symmetric_pd(const Matrix4& m, double tol = 1e-12);

}  // namespace nav2goal::est
