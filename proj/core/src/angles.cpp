#include "nav2goal/types.hpp"

#include <algorithm>

namespace nav2goal {

double wrap_angle(double angle) {
  double a = std::remainder(angle, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

Pose normalized(Pose pose) {
  pose.yaw = wrap_angle(pose.yaw);
  pose.pitch = std::clamp(pose.pitch, kMinPitch, kMaxPitch);
  return pose;
}

int clamp_class(double value) {
  const double r = std::round(value);
  return static_cast<int>(std::clamp(r, -static_cast<double>(kMaxClass), static_cast<double>(kMaxClass)));
}

Distribution one_hot(int cls) {
  Distribution d{};
  d[class_to_index(cls)] = 1.0;
  return d;
}

Distribution uniform_distribution() {
  Distribution d{};
  d.fill(1.0 / kNumClasses);
  return d;
}

double entropy(const Distribution& dist) {
  double h = 0.0;
  for (double p : dist) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double expected_class(const Distribution& dist) {
  double e = 0.0;
  for (int i = 0; i < kNumClasses; ++i) e += index_to_class(i) * dist[i];
  return e;
}

int argmax_class(const Distribution& dist) {
  return index_to_class(static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin()));
}

bool is_valid_distribution(const Distribution& dist, double tol) {
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace nav2goal
