#include "nav2goal/scale_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace nav2goal::est {

std::vector<Vec3> select_beam_points(const std::vector<Vec3>& cloud, double alpha) {
  std::vector<Vec3> out;
  const double cos_alpha = std::cos(alpha);
  for (const auto& p : cloud) {
    const double n = p.norm();
    if (!(n > 0.0)) throw std::invalid_argument("select_beam_points: zero-norm point");
    // Compare cosines: arccos is monotone decreasing on [-1, 1].
    if (std::clamp(p.z / n, -1.0, 1.0) >= cos_alpha) out.push_back(p);
  }
  return out;
}

std::optional<double> estimate_scale(const std::vector<Vec3>& beam_points, double range) {
  if (!(range > 0.0)) throw std::invalid_argument("estimate_scale: sonar range must be positive");
  if (beam_points.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& p : beam_points) sum += p.norm();
  return sum / static_cast<double>(beam_points.size()) / range;
}

ScaleEstimator::ScaleEstimator(int horizon, double aperture) : horizon_(horizon), aperture_(aperture) {
  if (horizon_ < 1) throw std::invalid_argument("ScaleEstimator: horizon must be at least 1");
}

bool ScaleEstimator::add(double s_hat) {
  if (!(s_hat > 0.0) || !std::isfinite(s_hat)) return false;
  buffer_.push_back(s_hat);
  while (buffer_.size() > static_cast<std::size_t>(horizon_)) buffer_.pop_front();
  return true;
}

bool ScaleEstimator::update(const std::vector<Vec3>& cloud, double sonar_range) {
  if (!(sonar_range > 0.0)) return false;
  const auto s = estimate_scale(select_beam_points(cloud, aperture_), sonar_range);
  return s && add(*s);
}

std::optional<double> ScaleEstimator::smoothed() const {
  if (buffer_.empty()) return std::nullopt;
  return std::accumulate(buffer_.begin(), buffer_.end(), 0.0) / static_cast<double>(buffer_.size());
}

}  // namespace nav2goal::est
