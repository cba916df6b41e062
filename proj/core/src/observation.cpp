#include "nav2goal/observation.hpp"

#include <algorithm>

namespace nav2goal::sim {

ViewClass view_class(SurfaceClass s) {
  switch (s) {
    case SurfaceClass::coral:
      return ViewClass::coral;
    case SurfaceClass::rock:
      return ViewClass::obstacle;
    case SurfaceClass::sand:
      break;
  }
  return ViewClass::sand;
}

CameraParams CameraParams::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  CameraParams c;
  c.width = cfg.get_int(prefix + "width", c.width);
  c.height = cfg.get_int(prefix + "height", c.height);
  c.hfov = deg2rad(cfg.get_double(prefix + "hfov_deg", rad2deg(c.hfov)));
  c.vfov = deg2rad(cfg.get_double(prefix + "vfov_deg", rad2deg(c.vfov)));
  c.tilt = deg2rad(cfg.get_double(prefix + "tilt_deg", rad2deg(c.tilt)));
  c.range_max = cfg.get_double(prefix + "range_max", c.range_max);
  c.down_rays = cfg.get_int(prefix + "down_rays", c.down_rays);
  c.down_fov = deg2rad(cfg.get_double(prefix + "down_fov_deg", rad2deg(c.down_fov)));
  return c;
}

int Observation::count(ViewClass c) const {
  return static_cast<int>(std::count(cell_class.begin(), cell_class.end(), c));
}

Vec3 body_to_world(double forward, double left, double up, double yaw, double pitch) {
  const double cp = std::cos(pitch);
  const double sp = std::sin(pitch);
  const double f = forward * cp - up * sp;
  const double u = forward * sp + up * cp;
  const double cy = std::cos(yaw);
  const double sy = std::sin(yaw);
  return {f * cy - left * sy, f * sy + left * cy, -u};
}

RayFan cast_fan(const World& world, const Pose& pose, const CameraParams& camera) {
  if (!world.contains(pose.x, pose.y)) throw OutOfBoundsError("render: pose outside world extent");
  RayFan fan;
  fan.origin = {pose.x, pose.y, pose.z};
  fan.width = camera.width;
  fan.height = camera.height;
  fan.forward.resize(static_cast<std::size_t>(camera.width) * camera.height);
  const double az_step = camera.hfov / camera.width;
  const double el_step = camera.vfov / camera.height;
  for (int row = 0; row < camera.height; ++row) {
    const double el = camera.vfov / 2.0 - (row + 0.5) * el_step - camera.tilt + pose.pitch;
    const double ce = std::cos(el);
    const double se = std::sin(el);
    for (int col = 0; col < camera.width; ++col) {
      CameraRay& ray = fan.forward[static_cast<std::size_t>(row) * camera.width + col];
      ray.azimuth_offset = camera.hfov / 2.0 - (col + 0.5) * az_step;
      const double az = pose.yaw + ray.azimuth_offset;
      ray.direction = {ce * std::cos(az), ce * std::sin(az), -se};
      ray.hit = world.cast_ray(fan.origin, ray.direction, camera.range_max);
    }
  }
  const int n = camera.down_rays;
  fan.down.reserve(static_cast<std::size_t>(n) * n);
  const double step = camera.down_fov / n;
  for (int i = 0; i < n; ++i) {
    const double a = -camera.down_fov / 2.0 + (i + 0.5) * step;
    for (int j = 0; j < n; ++j) {
      const double b = -camera.down_fov / 2.0 + (j + 0.5) * step;
      Vec3 dir = body_to_world(std::tan(a), -std::tan(b), -1.0, pose.yaw, pose.pitch);
      dir = dir * (1.0 / dir.norm());
      fan.down.push_back(world.cast_ray(fan.origin, dir, camera.range_max));
    }
  }
  return fan;
}

Observation observation_from_fan(const RayFan& fan, const CameraParams& camera) {
  Observation obs;
  obs.width = fan.width;
  obs.height = fan.height;
  obs.range_max = camera.range_max;
  obs.cell_class.resize(fan.forward.size());
  obs.distance.resize(fan.forward.size());
  for (std::size_t i = 0; i < fan.forward.size(); ++i) {
    const auto& ray = fan.forward[i];
    if (ray.hit) {
      obs.cell_class[i] = view_class(ray.hit->surface);
      obs.distance[i] = static_cast<float>(std::clamp(ray.hit->distance / camera.range_max, 0.0, 1.0));
    } else {
      obs.cell_class[i] = ViewClass::open_water;
      obs.distance[i] = 1.0f;
    }
  }
  obs.down_ray_count = static_cast<int>(fan.down.size());
  for (const auto& hit : fan.down) {
    if (hit && hit->surface == SurfaceClass::coral) ++obs.down_coral_hits;
  }
  obs.down_coral_fraction =
      obs.down_ray_count > 0 ? static_cast<float>(obs.down_coral_hits) / static_cast<float>(obs.down_ray_count) : 0.0f;
  return obs;
}

Observation render_observation(const World& world, const Pose& pose, const CameraParams& camera) {
  return observation_from_fan(cast_fan(world, pose, camera), camera);
}

}  // namespace nav2goal::sim
