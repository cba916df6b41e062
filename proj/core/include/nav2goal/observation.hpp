#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/types.hpp"
#include "nav2goal/world.hpp"

namespace nav2goal::sim {

enum class ViewClass : std::uint8_t { open_water = 0, coral = 1, sand = 2, obstacle = 3 };
inline constexpr int kNumViewClasses = 4;

ViewClass view_class(SurfaceClass s);

struct CameraParams {
  int width = 32;
  int height = 24;
  double hfov = deg2rad(90.0);
  double vfov = deg2rad(60.0);
  /// Downward mount tilt of the forward camera's optical axis.
  double tilt = deg2rad(15.0);
  double range_max = 8.0;
  /// Downward survey camera: down_rays x down_rays over a square frustum.
  int down_rays = 9;
  double down_fov = deg2rad(60.0);

  static CameraParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "camera.");
};

/// Egocentric forward view. Row 0 is the top of the image, column 0 the left
/// (anti-clockwise) edge. Each cell holds one class plus a normalized hit distance.
struct Observation {
  int width = 0;
  int height = 0;
  double range_max = 0.0;
  std::vector<ViewClass> cell_class;
  /// Hit distance / range_max in [0, 1]; 1 means no hit within range.
  std::vector<float> distance;
  /// Fraction of downward rays that hit coral.
  float down_coral_fraction = 0.0f;
  int down_ray_count = 0;
  int down_coral_hits = 0;

  std::size_t cell_index(int row, int col) const { return static_cast<std::size_t>(row) * width + col; }
  ViewClass at(int row, int col) const { return cell_class[cell_index(row, col)]; }
  /// One-hot class channel value (0 or 1).
  float class_channel(ViewClass c, int row, int col) const { return at(row, col) == c ? 1.0f : 0.0f; }
  int count(ViewClass c) const;
  bool operator==(const Observation&) const = default;
};

struct CameraRay {
  /// Azimuth relative to the robot heading (positive = anti-clockwise).
  double azimuth_offset = 0.0;
  Vec3 direction{};
  std::optional<RayHit> hit;
};

/// Full ray-cast result for one pose; the observation and the scripted expert
/// are both derived from it.
struct RayFan {
  Vec3 origin{};
  int width = 0;
  int height = 0;
  std::vector<CameraRay> forward;
  std::vector<std::optional<RayHit>> down;
};

/// Rotates a body-frame (forward, left, up) vector into the world frame (z down).
Vec3 body_to_world(double forward, double left, double up, double yaw, double pitch);

RayFan cast_fan(const World& world, const Pose& pose, const CameraParams& camera);
Observation observation_from_fan(const RayFan& fan, const CameraParams& camera);

/// Throws OutOfBoundsError when the pose lies outside the world extent.
Observation render_observation(const World& world, const Pose& pose, const CameraParams& camera = {});

}  // namespace nav2goal::sim
