#include "nav2goal/world.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

#include "nav2goal/rng.hpp"

namespace nav2goal::sim {

WorldParams WorldParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  WorldParams p;
  p.x_max = cfg.get_double(prefix + "x_max", p.x_max);
  p.y_max = cfg.get_double(prefix + "y_max", p.y_max);
  p.cell_size = cfg.get_double(prefix + "cell_size", p.cell_size);
  p.base_depth = cfg.get_double(prefix + "base_depth", p.base_depth);
  p.relief_amplitude = cfg.get_double(prefix + "relief_amplitude", p.relief_amplitude);
  p.relief_wavelength = cfg.get_double(prefix + "relief_wavelength", p.relief_wavelength);
  p.coral_patches = cfg.get_int(prefix + "coral_patches", p.coral_patches);
  p.coral_density = cfg.get_double(prefix + "coral_density", p.coral_density);
  p.coral_density_tolerance = cfg.get_double(prefix + "coral_density_tolerance", p.coral_density_tolerance);
  p.coral_radius_min = cfg.get_double(prefix + "coral_radius_min", p.coral_radius_min);
  p.coral_radius_max = cfg.get_double(prefix + "coral_radius_max", p.coral_radius_max);
  p.coral_height = cfg.get_double(prefix + "coral_height", p.coral_height);
  p.obstacle_density = cfg.get_double(prefix + "obstacle_density", p.obstacle_density);
  p.obstacle_radius_min = cfg.get_double(prefix + "obstacle_radius_min", p.obstacle_radius_min);
  p.obstacle_radius_max = cfg.get_double(prefix + "obstacle_radius_max", p.obstacle_radius_max);
  p.obstacle_height = cfg.get_double(prefix + "obstacle_height", p.obstacle_height);
  p.current.x = cfg.get_double(prefix + "current_x", p.current.x);
  p.current.y = cfg.get_double(prefix + "current_y", p.current.y);
  return p;
}

World::World(WorldParams params, std::uint64_t seed, int nx, int ny, std::vector<double> elevation,
             std::vector<SurfaceClass> surface)
    : params_(params), seed_(seed), nx_(nx), ny_(ny), elevation_(std::move(elevation)),
      surface_(std::move(surface)) {
  if (nx_ <= 0 || ny_ <= 0 || params_.cell_size <= 0.0) {
    throw std::invalid_argument("world grid must have positive dimensions");
  }
  const auto n = static_cast<std::size_t>(nx_) * ny_;
  if (elevation_.size() != n || surface_.size() != n) {
    throw std::invalid_argument("world grid size mismatch");
  }
  for (double e : elevation_) {
    if (!std::isfinite(e) || e >= 0.0) throw std::invalid_argument("seafloor elevation must be finite and below the surface");
  }
  label_components();
}

void World::label_components() {
  component_.assign(surface_.size(), -1);
  int next = 0;
  std::deque<int> queue;
  for (int cy = 0; cy < ny_; ++cy) {
    for (int cx = 0; cx < nx_; ++cx) {
      const auto i = index(cx, cy);
      if (surface_[i] != SurfaceClass::coral || component_[i] >= 0) continue;
      component_[i] = next;
      queue.push_back(static_cast<int>(i));
      while (!queue.empty()) {
        const int cur = queue.front();
        queue.pop_front();
        const int x = cur % nx_;
        const int y = cur / nx_;
        const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
        for (const auto& nb : nbr) {
          if (!cell_in_range(nb[0], nb[1])) continue;
          const auto j = index(nb[0], nb[1]);
          if (surface_[j] == SurfaceClass::coral && component_[j] < 0) {
            component_[j] = next;
            queue.push_back(static_cast<int>(j));
          }
        }
      }
      ++next;
    }
  }
}

bool World::contains(double x, double y) const {
  return x >= 0.0 && y >= 0.0 && x < extent_x() && y < extent_y();
}

int World::cell_x(double x) const { return static_cast<int>(std::floor(x / params_.cell_size)); }
int World::cell_y(double y) const { return static_cast<int>(std::floor(y / params_.cell_size)); }

double World::floor_depth_at(double x, double y) const {
  if (!contains(x, y)) throw OutOfBoundsError("position outside world extent");
  return floor_depth(cell_x(x), cell_y(y));
}

SurfaceClass World::surface_at(double x, double y) const {
  if (!contains(x, y)) throw OutOfBoundsError("position outside world extent");
  return surface(cell_x(x), cell_y(y));
}

double World::class_fraction(SurfaceClass c) const {
  const auto n = std::count(surface_.begin(), surface_.end(), c);
  return static_cast<double>(n) / static_cast<double>(surface_.size());
}

std::optional<RayHit> World::cast_ray(const Vec3& o, const Vec3& d, double max_range) const {
  if (!contains(o.x, o.y)) return std::nullopt;
  const double cs = params_.cell_size;
  constexpr double inf = std::numeric_limits<double>::infinity();
  int cx = std::min(cell_x(o.x), nx_ - 1);
  int cy = std::min(cell_y(o.y), ny_ - 1);
  const int step_x = d.x > 0.0 ? 1 : -1;
  const int step_y = d.y > 0.0 ? 1 : -1;
  double t_max_x = d.x > 0.0 ? ((cx + 1) * cs - o.x) / d.x : (d.x < 0.0 ? (cx * cs - o.x) / d.x : inf);
  double t_max_y = d.y > 0.0 ? ((cy + 1) * cs - o.y) / d.y : (d.y < 0.0 ? (cy * cs - o.y) / d.y : inf);
  const double t_delta_x = d.x != 0.0 ? cs / std::abs(d.x) : inf;
  const double t_delta_y = d.y != 0.0 ? cs / std::abs(d.y) : inf;

  double t = 0.0;
  while (true) {
    const double t_exit = std::min({t_max_x, t_max_y, max_range});
    const double depth = floor_depth(cx, cy);
    const double z_enter = o.z + d.z * t;
    double t_hit = -1.0;
    if (z_enter >= depth) {
      t_hit = t;
    } else if (d.z > 0.0 && o.z + d.z * t_exit >= depth) {
      t_hit = std::max(t, (depth - o.z) / d.z);
    }
    if (t_hit >= 0.0 && t_hit <= max_range) {
      RayHit hit;
      hit.distance = t_hit;
      hit.point = o + d * t_hit;
      hit.surface = surface(cx, cy);
      hit.cell_x = cx;
      hit.cell_y = cy;
      return hit;
    }
    if (t_exit >= max_range) return std::nullopt;
    if (t_max_x < t_max_y) {
      cx += step_x;
      t = t_max_x;
      t_max_x += t_delta_x;
    } else {
      cy += step_y;
      t = t_max_y;
      t_max_y += t_delta_y;
    }
    if (!cell_in_range(cx, cy)) return std::nullopt;
  }
}

namespace {

struct Blob {
  double cx, cy, radius, phase1, phase2;
};

template <typename Fn>
void for_each_blob_cell(const Blob& b, double cell, int nx, int ny, Fn&& fn) {
  const double reach = b.radius * 1.4;
  const int x0 = std::max(0, static_cast<int>(std::floor((b.cx - reach) / cell)));
  const int x1 = std::min(nx - 1, static_cast<int>(std::floor((b.cx + reach) / cell)));
  const int y0 = std::max(0, static_cast<int>(std::floor((b.cy - reach) / cell)));
  const int y1 = std::min(ny - 1, static_cast<int>(std::floor((b.cy + reach) / cell)));
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const double px = (x + 0.5) * cell - b.cx;
      const double py = (y + 0.5) * cell - b.cy;
      const double theta = std::atan2(py, px);
      const double r = b.radius * (1.0 + 0.25 * std::sin(3.0 * theta + b.phase1) + 0.12 * std::sin(5.0 * theta + b.phase2));
      if (px * px + py * py <= r * r) fn(x, y);
    }
  }
}

}  // namespace

World generate_world(std::uint64_t seed, const WorldParams& params) {
  if (!(params.x_max > 0.0) || !(params.y_max > 0.0)) {
    throw std::invalid_argument("world extents must be positive");
  }
  if (!(params.cell_size > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (params.base_depth - params.relief_amplitude - params.coral_height - params.obstacle_height <= 0.0) {
    throw std::invalid_argument("terrain would break the water surface; increase base_depth");
  }
  const int nx = std::max(1, static_cast<int>(std::lround(params.x_max / params.cell_size)));
  const int ny = std::max(1, static_cast<int>(std::lround(params.y_max / params.cell_size)));
  const auto n = static_cast<std::size_t>(nx) * ny;
  Rng rng = make_rng(seed, 0x77);

  struct Wave {
    double kx, ky, phase, amp;
  };
  std::vector<Wave> waves;
  double amp_total = 0.0;
  for (int i = 0; i < 4; ++i) {
    const double dir = uniform(rng, 0.0, kTwoPi);
    const double wl = params.relief_wavelength * uniform(rng, 0.6, 1.4);
    const double k = kTwoPi / wl;
    const double amp = uniform(rng, 0.5, 1.0);
    amp_total += amp;
    waves.push_back({k * std::cos(dir), k * std::sin(dir), uniform(rng, 0.0, kTwoPi), amp});
  }

  std::vector<double> depth(n);
  for (int y = 0; y < ny; ++y) {
    for (int x = 0; x < nx; ++x) {
      const double px = (x + 0.5) * params.cell_size;
      const double py = (y + 0.5) * params.cell_size;
      double h = 0.0;
      for (const auto& w : waves) h += w.amp * std::sin(w.kx * px + w.ky * py + w.phase);
      depth[static_cast<std::size_t>(y) * nx + x] = params.base_depth + params.relief_amplitude * h / amp_total;
    }
  }

  std::vector<SurfaceClass> surface(n, SurfaceClass::sand);
  std::size_t coral_cells = 0;
  const auto coral_target = static_cast<std::size_t>(params.coral_density * static_cast<double>(n));
  for (int p = 0; p < params.coral_patches && coral_cells < coral_target; ++p) {
    Blob b{uniform(rng, 0.0, nx * params.cell_size), uniform(rng, 0.0, ny * params.cell_size),
           uniform(rng, params.coral_radius_min, params.coral_radius_max), uniform(rng, 0.0, kTwoPi),
           uniform(rng, 0.0, kTwoPi)};
    for_each_blob_cell(b, params.cell_size, nx, ny, [&](int x, int y) {
      auto& s = surface[static_cast<std::size_t>(y) * nx + x];
      if (s != SurfaceClass::coral) {
        s = SurfaceClass::coral;
        ++coral_cells;
      }
    });
  }

  std::size_t rock_cells = 0;
  const auto rock_target = static_cast<std::size_t>(params.obstacle_density * static_cast<double>(n));
  while (rock_cells < rock_target) {
    Blob b{uniform(rng, 0.0, nx * params.cell_size), uniform(rng, 0.0, ny * params.cell_size),
           uniform(rng, params.obstacle_radius_min, params.obstacle_radius_max), uniform(rng, 0.0, kTwoPi),
           uniform(rng, 0.0, kTwoPi)};
    for_each_blob_cell(b, params.cell_size, nx, ny, [&](int x, int y) {
      auto& s = surface[static_cast<std::size_t>(y) * nx + x];
      if (s != SurfaceClass::rock) {
        s = SurfaceClass::rock;
        ++rock_cells;
      }
    });
  }

  std::vector<double> elevation(n);
  for (std::size_t i = 0; i < n; ++i) {
    double d = depth[i];
    if (surface[i] == SurfaceClass::coral) d -= params.coral_height;
    if (surface[i] == SurfaceClass::rock) d -= params.obstacle_height;
    elevation[i] = -d;
  }
  return World(params, seed, nx, ny, std::move(elevation), std::move(surface));
}

World make_flat_world(const WorldParams& params, double floor_depth, SurfaceClass surface) {
  const int nx = std::max(1, static_cast<int>(std::lround(params.x_max / params.cell_size)));
  const int ny = std::max(1, static_cast<int>(std::lround(params.y_max / params.cell_size)));
  const auto n = static_cast<std::size_t>(nx) * ny;
  return World(params, 0, nx, ny, std::vector<double>(n, -floor_depth), std::vector<SurfaceClass>(n, surface));
}

}  // namespace nav2goal::sim
