#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::sim {

enum class SurfaceClass : std::uint8_t { sand = 0, coral = 1, rock = 2 };

class OutOfBoundsError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

struct WorldParams {
  double x_max = 80.0;
  double y_max = 80.0;
  double cell_size = 0.5;
  /// Mean seafloor depth below the surface.
  double base_depth = 10.0;
  /// Amplitude of the smooth seafloor undulation.
  double relief_amplitude = 0.25;
  double relief_wavelength = 25.0;

  /// Maximum number of coral blobs; 0 disables coral entirely.
  int coral_patches = 2000;
  /// Target coral cell fraction; blobs are added until it is reached.
  double coral_density = 0.3;
  double coral_density_tolerance = 0.1;
  double coral_radius_min = 1.5;
  double coral_radius_max = 4.0;
  double coral_height = 0.3;

  /// Target fraction of rock-obstacle cells.
  double obstacle_density = 0.01;
  double obstacle_radius_min = 0.5;
  double obstacle_radius_max = 1.2;
  double obstacle_height = 1.2;

  /// Ambient water velocity (m/s).
  Vec2 current{};

  static WorldParams from_config(const KeyValueConfig& cfg, const std::string& prefix = "world.");
};

/// Result of a terrain ray cast. distance is measured along the unit direction.
struct RayHit {
  double distance = 0.0;
  Vec3 point{};
  SurfaceClass surface = SurfaceClass::sand;
  int cell_x = 0;
  int cell_y = 0;
};

/// 2.5D seafloor: one elevation and one surface class per square cell.
/// Elevations are negative (below the surface at 0); robot depth z is positive down,
/// so the floor depth under a cell is -elevation.
class World {
 public:
  World() = default;
  World(WorldParams params, std::uint64_t seed, int nx, int ny, std::vector<double> elevation,
        std::vector<SurfaceClass> surface);

  const WorldParams& params() const { return params_; }
  std::uint64_t seed() const { return seed_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double cell_size() const { return params_.cell_size; }
  double extent_x() const { return nx_ * params_.cell_size; }
  double extent_y() const { return ny_ * params_.cell_size; }
  Vec2 current() const { return params_.current; }

  bool contains(double x, double y) const;
  bool cell_in_range(int cx, int cy) const { return cx >= 0 && cy >= 0 && cx < nx_ && cy < ny_; }
  int cell_x(double x) const;
  int cell_y(double y) const;

  double elevation(int cx, int cy) const { return elevation_[index(cx, cy)]; }
  double floor_depth(int cx, int cy) const { return -elevation_[index(cx, cy)]; }
  SurfaceClass surface(int cx, int cy) const { return surface_[index(cx, cy)]; }
  /// Connected coral component id, or -1 for non-coral cells.
  int coral_component(int cx, int cy) const { return component_[index(cx, cy)]; }

  /// Floor depth under a world position; throws OutOfBoundsError outside the extent.
  double floor_depth_at(double x, double y) const;
  SurfaceClass surface_at(double x, double y) const;
  /// Height of the robot above the floor directly below it.
  double altitude(const Pose& pose) const { return floor_depth_at(pose.x, pose.y) - pose.z; }

  double class_fraction(SurfaceClass c) const;
  double coral_fraction() const { return class_fraction(SurfaceClass::coral); }

  /// Exact grid traversal against the blocky heightmap. dir must be unit length.
  /// Leaving the world extent or exceeding max_range yields no hit.
  std::optional<RayHit> cast_ray(const Vec3& origin, const Vec3& dir, double max_range) const;

  const std::vector<double>& elevations() const { return elevation_; }
  const std::vector<SurfaceClass>& surfaces() const { return surface_; }

 private:
  std::size_t index(int cx, int cy) const { return static_cast<std::size_t>(cy) * nx_ + cx; }
  void label_components();

  WorldParams params_{};
  std::uint64_t seed_ = 0;
  int nx_ = 0;
  int ny_ = 0;
  std::vector<double> elevation_;
  std::vector<SurfaceClass> surface_;
  std::vector<int> component_;
};

/// Deterministic world generation; the same (seed, params) gives a bit-identical world.
World generate_world(std::uint64_t seed, const WorldParams& params);

/// Flat sand floor at a fixed depth, for constructed test scenes.
World make_flat_world(const WorldParams& params, double floor_depth, SurfaceClass surface = SurfaceClass::sand);

}  // namespace nav2goal::sim
