#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "nav2goal/expert.hpp"

using namespace nav2goal;
using namespace nav2goal::sim;

namespace {

constexpr int kN = 40;
constexpr double kFloor = 6.0;

struct Scene {
  std::vector<double> elevation = std::vector<double>(kN * kN, -kFloor);
  std::vector<SurfaceClass> surface = std::vector<SurfaceClass>(kN * kN, SurfaceClass::sand);

  void paint(const std::function<bool(double, double)>& inside, SurfaceClass s, double height = 0.0) {
    for (int cy = 0; cy < kN; ++cy) {
      for (int cx = 0; cx < kN; ++cx) {
        if (!inside((cx + 0.5) * 0.5, (cy + 0.5) * 0.5)) continue;
        surface[cy * kN + cx] = s;
        elevation[cy * kN + cx] = -kFloor + height;
      }
    }
  }
  World world() const {
    WorldParams p;
    p.x_max = p.y_max = kN * 0.5;
    return World(p, 0, kN, kN, elevation, surface);
  }
  Scene mirrored() const {
    Scene m;
    for (int cy = 0; cy < kN; ++cy) {
      for (int cx = 0; cx < kN; ++cx) {
        m.surface[cy * kN + cx] = surface[(kN - 1 - cy) * kN + cx];
        m.elevation[cy * kN + cx] = elevation[(kN - 1 - cy) * kN + cx];
      }
    }
    return m;
  }
};

const Pose kPose{5.0, 10.0, kFloor - 1.0, 0.0, 0.0};

expert::ExpertParams deterministic() {
  expert::ExpertParams p;
  p.perturb_prob = 0.0;
  return p;
}

}  // namespace

TEST(Expert, CoralDeadAheadSteersStraight) {
  Scene s;
  s.paint([](double x, double y) { return x > 8.0 && x < 10.0 && std::abs(y - 10.0) < 1.0; }, SurfaceClass::coral);
  Rng rng = make_rng(1);
  const auto a = expert::expert_action(s.world(), kPose, rng, deterministic());
  EXPECT_EQ(a.yaw_class, 0);
}

TEST(Expert, CoralToTheLeftTurnsAntiClockwise) {
  Scene s;
  const Vec2 c = kPose.planar() + Vec2{std::cos(deg2rad(30.0)), std::sin(deg2rad(30.0))} * 4.0;
  s.paint([&](double x, double y) { return (Vec2{x, y} - c).norm() < 0.8; }, SurfaceClass::coral);
  Rng rng = make_rng(2);
  const auto a = expert::expert_action(s.world(), kPose, rng, deterministic());
  EXPECT_GT(a.yaw_class, 0);
}

TEST(Expert, WallAheadPitchesUp) {
  Scene s;
  s.paint([](double x, double) { return x >= 7.0 && x < 8.0; }, SurfaceClass::rock, 1.2);
  Rng rng = make_rng(3);
  expert::ExpertParams p;
  const auto fan = cast_fan(s.world(), kPose, CameraParams{});
  const auto d = expert::expert_decide(s.world(), kPose, fan, rng, p);
  EXPECT_EQ(d.branch, expert::ExpertBranch::avoid);
  EXPECT_GE(d.label.pitch_class, 2);
}

TEST(Expert, NoCoralGivesUniformYaw) {
  Scene s;
  Rng rng = make_rng(4);
  std::array<int, kNumClasses> counts{};
  const int n = 7000;
  for (int i = 0; i < n; ++i) ++counts[expert::expert_action(s.world(), kPose, rng).yaw_class + kMaxClass];
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 5.0 * std::sqrt(n / 7.0));
}

TEST(Expert, MirroredSceneNegatesYaw) {
  Rng scene_rng = make_rng(5);
  int checked = 0;
  for (int k = 0; k < 30; ++k) {
    Scene s;
    for (int b = 0; b < 3; ++b) {
      const Vec2 c{uniform(scene_rng, 7.0, 13.0), uniform(scene_rng, 5.0, 15.0)};
      const double r = uniform(scene_rng, 0.5, 1.5);
      s.paint([&](double x, double y) { return (Vec2{x, y} - c).norm() < r; }, SurfaceClass::coral);
    }
    Rng r1 = make_rng(6), r2 = make_rng(6);
    const auto fan = cast_fan(s.world(), kPose, CameraParams{});
    const auto a = expert::expert_decide(s.world(), kPose, fan, r1, deterministic());
    if (a.branch != expert::ExpertBranch::coral) continue;
    const auto m = s.mirrored();
    const auto b = expert::expert_action(m.world(), kPose, r2, deterministic());
    EXPECT_EQ(b.yaw_class, -a.label.yaw_class) << "scene " << k;
    EXPECT_EQ(b.pitch_class, a.label.pitch_class);
    ++checked;
  }
  EXPECT_GT(checked, 10);
}

TEST(Expert, LabelsInClassRange) {
  const auto w = generate_world(8, WorldParams{});
  Rng rng = make_rng(8);
  for (int i = 0; i < 500; ++i) {
    const double x = uniform(rng, 2.0, 78.0), y = uniform(rng, 2.0, 78.0);
    const Pose p{x, y, w.floor_depth_at(x, y) - uniform(rng, 0.3, 2.0), uniform(rng, -kPi, kPi), 0.0};
    const auto a = expert::expert_action(w, p, rng);
    ASSERT_GE(a.yaw_class, -kMaxClass);
    ASSERT_LE(a.yaw_class, kMaxClass);
    ASSERT_GE(a.pitch_class, -kMaxClass);
    ASSERT_LE(a.pitch_class, kMaxClass);
  }
}

TEST(Collect, EpisodeCountsAndDeterminism) {
  std::vector<World> worlds{generate_world(1, WorldParams{}), generate_world(2, WorldParams{})};
  expert::CollectParams c;
  c.episodes = 0;
  EXPECT_TRUE(expert::collect_bc_dataset(worlds, c, 1).empty());
  c.episodes = 4;
  c.steps = 50;
  const auto a = expert::collect_bc_dataset(worlds, c, 9);
  const auto b = expert::collect_bc_dataset(worlds, c, 9);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 4u);
  for (const auto& t : a) {
    for (std::size_t i = 0; i < t.records.size(); ++i) EXPECT_EQ(t.records[i].time_index, static_cast<int>(i));
  }
}

TEST(Collect, FullDatasetHas18000Frames) {
  std::vector<World> worlds;
  for (std::uint64_t s = 1; s <= 10; ++s) worlds.push_back(generate_world(s, WorldParams{}));
  expert::CollectParams c;
  const auto data = expert::collect_bc_dataset(worlds, c, 3);
  ASSERT_EQ(data.size(), 50u);
  std::size_t frames = 0, complete = 0;
  for (const auto& t : data) {
    frames += t.length();
    complete += t.length() == 360;
  }
  EXPECT_EQ(complete, 50u);
  EXPECT_EQ(frames, 18000u);
}

TEST(Collect, ExpertRarelyCollides) {
  expert::CollectParams c;
  c.episodes = 1;
  int collisions = 0;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const std::vector<World> w{generate_world(1000 + s, WorldParams{})};
    const auto data = expert::collect_bc_dataset(w, c, s);
    collisions += data.front().collision;
  }
  EXPECT_LT(collisions, 2);
}
