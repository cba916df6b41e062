#include <gtest/gtest.h>

#include <cmath>

#include "nav2goal/dynamics.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/sensors.hpp"
#include "nav2goal/world.hpp"

using namespace nav2goal;
using namespace nav2goal::sim;

namespace {

WorldParams small_params() {
  WorldParams p;
  p.x_max = 20.0;
  p.y_max = 20.0;
  return p;
}

// Floor far below, with a full-height rock slab occupying y >= 10 for x in [12, 14).
World wall_world() {
  WorldParams p = small_params();
  p.base_depth = 60.0;
  const int n = 40;
  std::vector<double> elevation(n * n, -60.0);
  std::vector<SurfaceClass> surface(n * n, SurfaceClass::sand);
  for (int cy = 20; cy < n; ++cy) {
    for (int cx = 24; cx < 28; ++cx) {
      elevation[cy * n + cx] = -0.01;
      surface[cy * n + cx] = SurfaceClass::rock;
    }
  }
  return World(p, 0, n, n, elevation, surface);
}

}  // namespace

TEST(World, SameSeedIsBitIdentical) {
  const auto a = generate_world(7, WorldParams{});
  const auto b = generate_world(7, WorldParams{});
  EXPECT_EQ(a.elevations(), b.elevations());
  EXPECT_EQ(a.surfaces(), b.surfaces());
}

TEST(World, NoCoralPatchesMeansNoCoral) {
  WorldParams p;
  p.coral_patches = 0;
  const auto w = generate_world(3, p);
  EXPECT_EQ(w.coral_fraction(), 0.0);
  for (auto s : w.surfaces()) EXPECT_NE(s, SurfaceClass::coral);
}

TEST(World, CoralDensityNearTarget) {
  const auto w = generate_world(7, WorldParams{});
  std::size_t coral = 0;
  for (auto s : w.surfaces()) coral += s == SurfaceClass::coral;
  const double fraction = static_cast<double>(coral) / w.surfaces().size();
  EXPECT_GE(fraction, 0.2);
  EXPECT_LE(fraction, 0.4);
}

TEST(World, RejectsNonPositiveExtent) {
  WorldParams p;
  p.x_max = 0.0;
  EXPECT_THROW(generate_world(1, p), std::invalid_argument);
  p.x_max = 10.0;
  p.y_max = -1.0;
  EXPECT_THROW(generate_world(1, p), std::invalid_argument);
}

TEST(World, ElevationsFiniteAndSubmerged) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto w = generate_world(seed, WorldParams{});
    for (double e : w.elevations()) {
      ASSERT_TRUE(std::isfinite(e));
      ASSERT_LT(e, 0.0);
    }
  }
}

TEST(Dynamics, StraightRunAtNominalSpeed) {
  RobotState s;
  s.speed = 0.41;
  const auto next = step_dynamics(s, 0.0, 0.0, 1.0);
  EXPECT_NEAR(next.pose.x, 0.41, 1e-12);
  EXPECT_NEAR(next.pose.y, 0.0, 1e-12);
}

TEST(Dynamics, CommandsSaturateAtLimit) {
  RobotState s;
  for (int i = 0; i < 20; ++i) s = step_dynamics(s, 2.0 * s.max_yaw_rate, -5.0 * s.max_pitch_rate, kControlDt);
  EXPECT_DOUBLE_EQ(s.yaw_rate, s.max_yaw_rate);
  EXPECT_DOUBLE_EQ(s.pitch_rate, -s.max_pitch_rate);
}

TEST(Dynamics, RatesSlewOverHalfASecond) {
  RobotState s;
  s = step_dynamics(s, s.max_yaw_rate, 0.0, 0.25);
  EXPECT_NEAR(s.yaw_rate, 0.5 * s.max_yaw_rate, 1e-12);
}

TEST(Dynamics, FullTurnAtMaxRateTracesCircle) {
  RobotState s;
  s.yaw_rate = s.max_yaw_rate;
  const double radius = s.speed / s.max_yaw_rate;
  const Vec2 centre{0.0, radius};
  const int steps = static_cast<int>(std::round(kTwoPi / s.max_yaw_rate / kControlDt));
  for (int i = 0; i < steps; ++i) {
    s = step_dynamics(s, s.max_yaw_rate, 0.0, kControlDt);
    ASSERT_NEAR((s.pose.planar() - centre).norm(), radius, 1e-3);
  }
  EXPECT_NEAR(s.pose.x, 0.0, 1e-3);
  EXPECT_NEAR(s.pose.y, 0.0, 1e-3);
}

TEST(Dynamics, PoseInvariantsUnderRandomCommands) {
  Rng rng = make_rng(11);
  RobotState s;
  for (int i = 0; i < 5000; ++i) {
    s = step_dynamics(s, uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0), kControlDt);
    ASSERT_GT(s.pose.yaw, -kPi);
    ASSERT_LE(s.pose.yaw, kPi);
    ASSERT_GE(s.pose.pitch, kMinPitch);
    ASSERT_LE(s.pose.pitch, kMaxPitch);
    ASSERT_LE(std::abs(s.yaw_rate), s.max_yaw_rate);
    ASSERT_LE(std::abs(s.pitch_rate), s.max_pitch_rate);
  }
}

TEST(Dynamics, DistanceEqualsSpeedTimesDt) {
  Rng rng = make_rng(12);
  for (int i = 0; i < 1000; ++i) {
    RobotState s;
    s.pose.yaw = uniform(rng, -kPi, kPi);
    s.pose.pitch = uniform(rng, kMinPitch, kMaxPitch);
    s.speed = uniform(rng, 0.1, 1.0);
    const double dt = uniform(rng, 0.01, 1.0);
    const auto n = step_dynamics(s, 0.0, 0.0, dt);
    const double d = std::sqrt(std::pow(n.pose.x - s.pose.x, 2) + std::pow(n.pose.y - s.pose.y, 2) +
                               std::pow(n.pose.z - s.pose.z, 2));
    ASSERT_NEAR(d, s.speed * dt, 1e-9);
  }
}

TEST(Dynamics, RejectsNonPositiveDt) { EXPECT_THROW(step_dynamics(RobotState{}, 0, 0, 0.0), std::invalid_argument); }

TEST(Render, HighAboveFlatSandSeesOpenWater) {
  const auto w = make_flat_world(small_params(), 30.0);
  const auto obs = render_observation(w, {10.0, 10.0, 20.0, 0.0, 0.0});
  EXPECT_EQ(obs.count(ViewClass::open_water), obs.width * obs.height);
  for (float d : obs.distance) EXPECT_EQ(d, 1.0f);
}

TEST(Render, OverPureCoralDownFractionIsOne) {
  const auto w = make_flat_world(small_params(), 5.0, SurfaceClass::coral);
  const auto obs = render_observation(w, {10.0, 10.0, 4.0, 0.3, 0.0});
  EXPECT_EQ(obs.down_coral_fraction, 1.0f);
  EXPECT_EQ(obs.down_coral_hits, obs.down_ray_count);
}

TEST(Render, LeftHalfWallIsObstacleRightHalfOpenWater) {
  const auto w = wall_world();
  const auto obs = render_observation(w, {10.0, 10.0, 20.0, 0.0, 0.0});
  for (int r = 0; r < obs.height; ++r) {
    for (int c = 0; c < obs.width; ++c) {
      const auto expected = c < obs.width / 2 ? ViewClass::obstacle : ViewClass::open_water;
      ASSERT_EQ(obs.at(r, c), expected) << "row " << r << " col " << c;
    }
  }
}

TEST(Render, OutsideExtentThrows) {
  const auto w = make_flat_world(small_params(), 5.0);
  EXPECT_THROW(render_observation(w, {-1.0, 5.0, 2.0, 0.0, 0.0}), OutOfBoundsError);
}

TEST(Render, ChannelConstraintsOnRandomPoses) {
  const auto w = generate_world(5, WorldParams{});
  Rng rng = make_rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double x = uniform(rng, 1.0, w.extent_x() - 1.0);
    const double y = uniform(rng, 1.0, w.extent_y() - 1.0);
    const Pose p{x, y, w.floor_depth_at(x, y) - uniform(rng, 0.3, 3.0), uniform(rng, -kPi, kPi),
                 uniform(rng, kMinPitch, kMaxPitch)};
    const auto obs = render_observation(w, p);
    ASSERT_EQ(obs.cell_class.size(), static_cast<std::size_t>(obs.width * obs.height));
    int total = 0;
    for (int c = 0; c < kNumViewClasses; ++c) total += obs.count(static_cast<ViewClass>(c));
    ASSERT_EQ(total, obs.width * obs.height);
    for (float d : obs.distance) ASSERT_TRUE(d >= 0.0f && d <= 1.0f);
    ASSERT_GE(obs.down_coral_fraction, 0.0f);
    ASSERT_LE(obs.down_coral_fraction, 1.0f);
  }
}

TEST(Render, Deterministic) {
  const auto w = generate_world(9, WorldParams{});
  const Pose p{40.0, 40.0, w.floor_depth_at(40.0, 40.0) - 1.0, 0.7, 0.1};
  EXPECT_EQ(render_observation(w, p), render_observation(w, p));
}

TEST(Sensors, NoiselessCompassIsExact) {
  const auto w = make_flat_world(small_params(), 5.0, SurfaceClass::coral);
  SensorModel model(NoiseParams::noiseless());
  Rng rng = make_rng(1);
  RobotState s;
  s.pose = {10.0, 10.0, 4.0, 1.234, 0.0};
  const auto b = model.sense(w, s, s, rng);
  EXPECT_EQ(b.compass_yaw, s.pose.yaw);
  EXPECT_EQ(b.depth_meas, s.pose.z);
}

TEST(Sensors, SandCausesDropout) {
  const auto w = make_flat_world(small_params(), 5.0, SurfaceClass::sand);
  NoiseParams n = NoiseParams::noiseless();
  n.sand_dropout = true;
  SensorModel model(n);
  Rng rng = make_rng(2);
  RobotState s;
  s.pose = {10.0, 10.0, 4.0, 0.0, 0.0};
  const auto b = model.sense(w, s, s, rng);
  EXPECT_TRUE(b.dropout_flag);
  EXPECT_TRUE(b.point_cloud.empty());
}

TEST(Sensors, HiddenScaleMultipliesPointDistances) {
  const auto w = make_flat_world(small_params(), 6.0, SurfaceClass::coral);
  NoiseParams n = NoiseParams::noiseless();
  n.initial_scale = 2.0;
  SensorModel model(n);
  Rng rng = make_rng(3);
  RobotState s;
  s.pose = {10.0, 10.0, 3.0, 0.4, 0.0};
  const auto b = model.sense(w, s, s, rng);
  ASSERT_FALSE(b.dropout_flag);
  ASSERT_FALSE(b.point_cloud.empty());
  for (const auto& p : b.point_cloud) EXPECT_NEAR(p.z / 2.0, 3.0, 1e-9);
  ASSERT_TRUE(b.sonar_valid);
  // Beam-averaged slant range over a 30 degree cone reads a little long.
  EXPECT_NEAR(b.sonar_range, 3.0, 0.3);
  EXPECT_GE(b.sonar_range, 3.0);
}

TEST(Sensors, IdenticalSeedsGiveIdenticalTrajectories) {
  const auto w = generate_world(4, WorldParams{});
  auto run = [&] {
    SensorModel model;
    Rng rng = make_rng(42);
    RobotState s;
    s.pose = {40.0, 40.0, w.floor_depth_at(40.0, 40.0) - 1.0, 0.0, 0.0};
    std::vector<double> trace;
    for (int i = 0; i < 50; ++i) {
      const auto prev = s;
      s = step_dynamics(s, 0.1 * std::sin(i * 0.3), 0.0, kControlDt);
      const auto b = model.sense(w, s, prev, rng);
      trace.insert(trace.end(), {s.pose.x, s.pose.y, b.compass_yaw, b.sonar_range, b.odom_translation.x});
    }
    return trace;
  };
  EXPECT_EQ(run(), run());
}
