#pragma once

#include <deque>
#include <optional>
#include <vector>

#include "nav2goal/types.hpp"

namespace nav2goal::est {

/// Points whose angle to the optical axis (0, 0, 1) is at most alpha.
/// Throws std::invalid_argument on a zero-norm point.
std::vector<Vec3> select_beam_points(const std::vector<Vec3>& cloud, double alpha);

/// Mean point norm divided by the sonar range; nullopt for an empty subset.
/// Throws std::invalid_argument when range <= 0.
std::optional<double> estimate_scale(const std::vector<Vec3>& beam_points, double range);

/// Windowed mean over the last `horizon` raw scale estimates.
class ScaleEstimator {
 public:
  explicit ScaleEstimator(int horizon = 10, double aperture = deg2rad(30.0));

  /// Records a raw estimate; non-positive or non-finite values are rejected.
  bool add(double s_hat);
  /// Beam selection and ratio for one keyframe; returns whether an estimate was recorded.
  bool update(const std::vector<Vec3>& cloud, double sonar_range);
  std::optional<double> smoothed() const;

  int horizon() const { return horizon_; }
  double aperture() const { return aperture_; }
  std::size_t size() const { return buffer_.size(); }
  const std::deque<double>& buffer() const { return buffer_; }

 private:
  int horizon_;
  double aperture_;
  std::deque<double> buffer_;
};

}  // namespace nav2goal::est
