#include "nav2goal/ekf.hpp"

#include <cmath>
#include <stdexcept>

namespace nav2goal::est {

EkfNoise EkfNoise::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  EkfNoise n;
  n.q_position = cfg.get_double(prefix + "q_position", n.q_position);
  n.q_yaw = cfg.get_double(prefix + "q_yaw", n.q_yaw);
  n.r_compass = cfg.get_double(prefix + "r_compass", n.r_compass);
  n.r_depth = cfg.get_double(prefix + "r_depth", n.r_depth);
  n.r_odometry = cfg.get_double(prefix + "r_odometry", n.r_odometry);
  return n;
}

Matrix4 process_noise(const EkfNoise& noise, double dt) {
  Matrix4 q = Matrix4::Zero();
  q(kX, kX) = q(kY, kY) = q(kZ, kZ) = noise.q_position * dt;
  q(kYaw, kYaw) = noise.q_yaw * dt;
  return q;
}

EkfState ekf_predict(const EkfState& state, double gyro, double dt, const Matrix4& q) {
  if (!(dt > 0.0)) throw std::invalid_argument("ekf_predict: dt must be positive");
  EkfState out = state;
  const double yaw = state.mean(kYaw);
  const double v = state.speed_prior;
  out.mean(kX) += v * std::cos(yaw) * dt;
  out.mean(kY) += v * std::sin(yaw) * dt;
  out.mean(kYaw) = wrap_angle(yaw + gyro * dt);
  Matrix4 f = Matrix4::Identity();
  f(kX, kYaw) = -v * std::sin(yaw) * dt;
  f(kY, kYaw) = v * std::cos(yaw) * dt;
  out.cov = f * state.cov * f.transpose() + q;
  out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
  return out;
}

template <int M>
UpdateResult ekf_update(EkfState& state, const Eigen::Matrix<double, M, 1>& z,
                        const Eigen::Matrix<double, M, 1>& predicted, const Eigen::Matrix<double, M, 4>& h,
                        const Eigen::Matrix<double, M, M>& r, double gate, int wrap_row) {
  using VecM = Eigen::Matrix<double, M, 1>;
  using MatM = Eigen::Matrix<double, M, M>;
  Eigen::LLT<MatM> r_llt(r);
  if (r_llt.info() != Eigen::Success || !r.isApprox(r.transpose())) {
    throw std::invalid_argument("ekf_update: measurement noise must be symmetric positive definite");
  }
  VecM innovation = z - predicted;
  if (wrap_row >= 0) innovation(wrap_row) = wrap_angle(innovation(wrap_row));
  const MatM s = h * state.cov * h.transpose() + r;
  Eigen::LLT<MatM> s_llt(s);
  UpdateResult result;
  result.nis = innovation.dot(s_llt.solve(innovation));
  if (!(result.nis <= gate)) {
    result.accepted = false;
    return result;
  }
  const Eigen::Matrix<double, 4, M> k = s_llt.solve(h * state.cov).transpose();
  state.mean += k * innovation;
  state.mean(kYaw) = wrap_angle(state.mean(kYaw));
  const Matrix4 a = Matrix4::Identity() - k * h;
  state.cov = a * state.cov * a.transpose() + k * r * k.transpose();
  state.cov = 0.5 * (state.cov + state.cov.transpose()).eval();
  return result;
}

template UpdateResult ekf_update<1>(EkfState&, const Eigen::Matrix<double, 1, 1>&, const Eigen::Matrix<double, 1, 1>&,
                                    const Eigen::Matrix<double, 1, 4>&, const Eigen::Matrix<double, 1, 1>&, double,
                                    int);
template UpdateResult ekf_update<2>(EkfState&, const Eigen::Matrix<double, 2, 1>&, const Eigen::Matrix<double, 2, 1>&,
                                    const Eigen::Matrix<double, 2, 4>&, const Eigen::Matrix<double, 2, 2>&, double,
                                    int);

UpdateResult update_compass(EkfState& state, double yaw_meas, double r, double gate) {
  Eigen::Matrix<double, 1, 4> h = Eigen::Matrix<double, 1, 4>::Zero();
  h(0, kYaw) = 1.0;
  return ekf_update<1>(state, Eigen::Matrix<double, 1, 1>(yaw_meas), Eigen::Matrix<double, 1, 1>(state.mean(kYaw)), h,
                       Eigen::Matrix<double, 1, 1>(r), gate, 0);
}

UpdateResult update_depth(EkfState& state, double depth_meas, double r, double gate) {
  Eigen::Matrix<double, 1, 4> h = Eigen::Matrix<double, 1, 4>::Zero();
  h(0, kZ) = 1.0;
  return ekf_update<1>(state, Eigen::Matrix<double, 1, 1>(depth_meas), Eigen::Matrix<double, 1, 1>(state.mean(kZ)), h,
                       Eigen::Matrix<double, 1, 1>(r), gate);
}

UpdateResult update_odometry(EkfState& state, const Vec2& body_velocity, const Vector4& anchor, double dt, double r,
                             double gate) {
  if (!(dt > 0.0)) throw std::invalid_argument("update_odometry: dt must be positive");
  const double c = std::cos(anchor(kYaw));
  const double s = std::sin(anchor(kYaw));
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, kX) = c / dt;
  h(0, kY) = s / dt;
  h(1, kX) = -s / dt;
  h(1, kY) = c / dt;
  const double dx = state.mean(kX) - anchor(kX);
  const double dy = state.mean(kY) - anchor(kY);
  const Eigen::Vector2d predicted((c * dx + s * dy) / dt, (-s * dx + c * dy) / dt);
  const Eigen::Vector2d z(body_velocity.x, body_velocity.y);
  return ekf_update<2>(state, z, predicted, h, Eigen::Matrix2d::Identity() * r, gate);
}

bool is_symmetric_pd(const Matrix4& m, double tol) {
  if (!m.allFinite()) return false;
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol * std::max(1.0, m.cwiseAbs().maxCoeff())) return false;
  Eigen::SelfAdjointEigenSolver<Matrix4> es(m);
  return es.info() == Eigen::Success && es.eigenvalues().minCoeff() > 0.0;
}

}  // namespace nav2goal::est
