#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace nav2goal {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Control loop runs at 6 Hz.
inline constexpr double kControlRateHz = 6.0;
inline constexpr double kControlDt = 1.0 / kControlRateHz;

/// Number of discrete action classes, C = {-3..3}.
inline constexpr int kNumClasses = 7;
inline constexpr int kMaxClass = 3;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Wraps an angle to (-pi, pi].
double wrap_angle(double angle);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
  double norm() const { return std::hypot(x, y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Planar rotation of v by angle (counter-clockwise).
inline Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline constexpr double kMinPitch = -kPi / 4.0;
inline constexpr double kMaxPitch = kPi / 4.0;

/// World-frame pose. z is depth below the surface (positive down), yaw is
/// wrapped to (-pi, pi] and pitch is clamped to [-pi/4, pi/4] (nose up positive).
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double yaw = 0.0;
  double pitch = 0.0;

  Vec2 planar() const { return {x, y}; }
  bool operator==(const Pose&) const = default;
};

/// Re-establishes the yaw-wrap and pitch-clamp invariants.
Pose normalized(Pose pose);

/// Action classes in C = {-3, ..., 3}. Negative is clockwise / downward.
struct ActionLabel {
  int yaw_class = 0;
  int pitch_class = 0;
  bool operator==(const ActionLabel&) const = default;
};

inline constexpr int class_to_index(int cls) { return cls + kMaxClass; }
inline constexpr int index_to_class(int idx) { return idx - kMaxClass; }
inline constexpr bool is_valid_class(int cls) { return cls >= -kMaxClass && cls <= kMaxClass; }
int clamp_class(double value);

using Distribution = std::array<double, kNumClasses>;

/// Two categorical heads over C: yaw and pitch.
struct ActionHeads {
  Distribution yaw{};
  Distribution pitch{};
};

Distribution one_hot(int cls);
Distribution uniform_distribution();
/// Natural-log entropy.
double entropy(const Distribution& dist);
/// Expected class value sum_k k * p_k.
double expected_class(const Distribution& dist);
int argmax_class(const Distribution& dist);
bool is_valid_distribution(const Distribution& dist, double tol);

}  // namespace nav2goal
