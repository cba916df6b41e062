#include <gtest/gtest.h>

#include <cmath>

#include "nav2goal/dynamics.hpp"
#include "nav2goal/mission.hpp"
#include "nav2goal/policies.hpp"
#include "nav2goal/splice.hpp"
#include "nav2goal/world.hpp"

using namespace nav2goal;
using namespace nav2goal::mission;

namespace {

int yaw_class(const ActionHeads& h) { return argmax_class(h.yaw); }

sim::World open_world(double size = 40.0) {
  sim::WorldParams p;
  p.x_max = size;
  p.y_max = size;
  return sim::make_flat_world(p, 5.0, sim::SurfaceClass::coral);
}

MissionParams quiet_params() {
  MissionParams p;
  p.noise = sim::NoiseParams::noiseless();
  p.use_true_pose = true;
  return p;
}

sim::RobotState start_at(double x, double y, double yaw) {
  sim::RobotState s;
  s.pose = {x, y, 4.0, yaw, 0.0};
  return s;
}

// Episode driven by piecewise-constant random commands, recorded for replay.
hindsight::Trajectory driven_episode(std::uint32_t id, std::uint64_t world_seed, int steps, Rng& rng) {
  hindsight::Trajectory t;
  t.id = id;
  t.seed = world_seed;
  sim::RobotState s = start_at(uniform(rng, 5, 15), uniform(rng, 5, 15), uniform(rng, -kPi, kPi));
  double cmd = 0.0;
  for (int i = 0; i < steps; ++i) {
    if (i % 12 == 0) cmd = deg2rad(10.0 * uniform_int(rng, -3, 3));
    hindsight::TrajectoryRecord r;
    r.time_index = i;
    r.observation.width = 1;
    r.observation.height = 1;
    r.observation.cell_class = {sim::ViewClass::open_water};
    r.observation.distance = {1.0f};
    r.true_pose = r.est_pose = s.pose;
    r.speed = s.speed;
    r.yaw_rate = s.yaw_rate;
    r.pitch_rate = s.pitch_rate;
    r.command = {cmd, 0.0};
    t.records.push_back(r);
    s = sim::step_dynamics(s, cmd, 0.0, kControlDt);
  }
  return t;
}

std::vector<hindsight::Trajectory> driven_store(int episodes, int steps, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<hindsight::Trajectory> store;
  for (int e = 0; e < episodes; ++e) store.push_back(driven_episode(static_cast<std::uint32_t>(e), 77, steps, rng));
  return store;
}

}  // namespace

TEST(Greedy, DeadAheadIsStraight) {
  EXPECT_EQ(yaw_class(greedy_policy(Vec2{5.0, 0.0})), 0);
  EXPECT_EQ(greedy_policy(Vec2{5.0, 0.0}).pitch, one_hot(0));
}

TEST(Greedy, QuarterTurnSaturates) {
  EXPECT_EQ(yaw_class(greedy_policy(Vec2{0.0, 3.0})), 3);
  EXPECT_EQ(yaw_class(greedy_policy(Vec2{0.0, -3.0})), -3);
}

TEST(Greedy, BehindBreaksAntiClockwise) {
  EXPECT_EQ(yaw_class(greedy_policy(Vec2{-4.0, 0.0})), 3);
  EXPECT_EQ(std::abs(yaw_class(greedy_policy(Vec2{-4.0, -1e-9}))), 3);
}

TEST(Greedy, ProportionalBins) {
  for (int deg = -44; deg <= 44; ++deg) {
    const double b = deg2rad(deg);
    const int want = std::clamp(static_cast<int>(std::lround(deg / 15.0)), -3, 3);
    ASSERT_EQ(yaw_class(greedy_policy(Vec2{std::cos(b), std::sin(b)})), want) << deg;
  }
}

TEST(Greedy, WorldFrameOverloadUsesEstimate) {
  const Pose est{10, 10, 2, kPi / 2, 0};
  EXPECT_EQ(yaw_class(greedy_policy(est, Vec2{10, 15})), 0);
  EXPECT_EQ(yaw_class(greedy_policy(est, Vec2{5, 10})), 3);
}

TEST(MissionText, RoundTrip) {
  Mission m;
  m.waypoints = {{1.5, 2.25}, {-3.0, 4.0}};
  m.threshold = 0.75;
  m.timeout = 42.0;
  m.world_seed = 123456789012345ULL;
  m.start = Pose{1, 2, 3, 0.5, -0.1};
  const auto back = parse_mission(format_mission(m));
  EXPECT_EQ(back.waypoints.size(), 2u);
  EXPECT_DOUBLE_EQ(back.waypoints[1].x, -3.0);
  EXPECT_DOUBLE_EQ(back.threshold, 0.75);
  EXPECT_DOUBLE_EQ(back.timeout, 42.0);
  EXPECT_EQ(back.world_seed, m.world_seed);
  ASSERT_TRUE(back.start.has_value());
  EXPECT_DOUBLE_EQ(back.start->yaw, 0.5);
}

TEST(MissionText, CommentsAndErrors) {
  const auto m = parse_mission("# survey\nthreshold 2\n\n1 2  # first\n3 4\n");
  EXPECT_EQ(m.waypoints.size(), 2u);
  EXPECT_DOUBLE_EQ(m.threshold, 2.0);
  EXPECT_THROW(parse_mission("threshold 1\n"), std::invalid_argument);
  EXPECT_THROW(parse_mission("1 2 3\n"), std::invalid_argument);
  EXPECT_THROW(parse_mission("threshold 0\n1 2\n"), std::invalid_argument);
  EXPECT_THROW(parse_mission("bogus line\n"), std::invalid_argument);
}

TEST(RunMission, WaypointAtStartIsReachedImmediately) {
  const auto world = open_world();
  GreedyPolicy greedy;
  Mission m;
  m.waypoints = {{10.0, 20.0}, {20.0, 20.0}};
  const auto log = run_mission(world, greedy, m, start_at(10, 20, 0), quiet_params(), 1);
  ASSERT_FALSE(log.passes.empty());
  EXPECT_EQ(log.passes[0].reached_step, 0);
  EXPECT_EQ(log.steps.front().active, 1);
  EXPECT_TRUE(log.completed());
}

TEST(RunMission, GreedyReachesWithinStraightLineBound) {
  const auto world = open_world(60.0);
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 12; ++trial) {
    const double bearing = uniform(rng, -kPi, kPi), d = uniform(rng, 5, 20);
    const Vec2 wp{30 + d * std::cos(bearing), 30 + d * std::sin(bearing)};
    Mission m;
    m.waypoints = {wp};
    m.timeout = 120;
    GreedyPolicy greedy;
    const auto log = run_mission(world, greedy, m, start_at(30, 30, 0), MissionParams{}, 100 + trial);
    ASSERT_TRUE(log.completed()) << to_string(log.end);
    const double bound = (d - m.threshold) / 0.41;
    EXPECT_LE(log.passes[0].reached_step * kControlDt, 1.5 * bound) << "bearing " << bearing << " d " << d;
  }
}

TEST(RunMission, ActiveIndexIsMonotone) {
  const auto world = open_world();
  GreedyPolicy greedy;
  Mission m;
  m.waypoints = {{15, 20}, {20, 25}, {15, 30}, {10, 25}, {14, 19}};
  const auto log = run_mission(world, greedy, m, start_at(10, 20, 0), MissionParams{}, 3);
  EXPECT_TRUE(log.completed());
  EXPECT_EQ(log.reached, 5);
  for (std::size_t i = 1; i < log.steps.size(); ++i) ASSERT_GE(log.steps[i].active, log.steps[i - 1].active);
  for (const auto& s : log.steps) {
    ASSERT_GE(s.coral_fraction, 0.0);
    ASSERT_LE(s.coral_fraction, 1.0);
  }
}

TEST(RunMission, SharpCornerOvershoots) {
  const auto world = open_world();
  GreedyPolicy greedy;
  Mission m;
  m.threshold = 0.2;
  m.waypoints = {{15.0, 20.0}, {15.0, 19.5}};
  const auto log = run_mission(world, greedy, m, start_at(10, 20, 0), quiet_params(), 4);
  ASSERT_EQ(log.passes.size(), 2u);
  EXPECT_FALSE(log.passes[0].overshoot);
  EXPECT_TRUE(log.passes[1].overshoot);
  EXPECT_GT(log.passes[1].first_pass_distance, m.threshold);
}

TEST(RunMission, TimeoutAndLeavingTheWorldAreOutcomes) {
  const auto world = open_world(20.0);
  GreedyPolicy greedy;
  Mission far;
  far.waypoints = {{60.0, 10.0}};
  const auto left = run_mission(world, greedy, far, start_at(10, 10, 0), quiet_params(), 5);
  EXPECT_EQ(left.end, MissionEnd::left_world);
  Mission slow;
  slow.waypoints = {{18.0, 10.0}};
  slow.timeout = 2.0;
  const auto late = run_mission(world, greedy, slow, start_at(10, 10, 0), quiet_params(), 6);
  EXPECT_EQ(late.end, MissionEnd::timeout);
  EXPECT_EQ(late.reached, 0);
}

TEST(RunMission, CsvHasOneRowPerStep) {
  const auto world = open_world();
  GreedyPolicy greedy;
  Mission m;
  m.waypoints = {{14, 20}};
  const auto log = run_mission(world, greedy, m, start_at(10, 20, 0), quiet_params(), 7);
  const auto text = mission_log_csv(log).str();
  EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), log.steps.size() + 2);
}

TEST(Polyline, LengthAndResampling) {
  const std::vector<Vec2> path{{0, 0}, {3, 0}, {3, 4}};
  EXPECT_DOUBLE_EQ(polyline_length(path), 7.0);
  const auto pts = resample_polyline(path, 2.0, 10);
  ASSERT_EQ(pts.size(), 3u);
  EXPECT_DOUBLE_EQ(pts[0].x, 2.0);
  EXPECT_DOUBLE_EQ(pts[1].x, 3.0);
  EXPECT_DOUBLE_EQ(pts[1].y, 1.0);
  EXPECT_DOUBLE_EQ(pts[2].y, 3.0);
  EXPECT_EQ(resample_polyline(path, 2.0, 2).size(), 2u);
}

TEST(Splice, ExactJoinAddsLengths) {
  Rng rng = make_rng(8);
  auto a = driven_episode(0, 5, 40, rng);
  sim::RobotState s = hindsight::record_state(a.records.back(), {});
  s = sim::step_dynamics(s, a.records.back().command.x, 0.0, kControlDt);
  hindsight::Trajectory b;
  b.id = 1;
  b.seed = 5;
  for (int i = 0; i < 40; ++i) {
    hindsight::TrajectoryRecord r = a.records[0];
    r.time_index = i;
    r.true_pose = r.est_pose = s.pose;
    r.yaw_rate = s.yaw_rate;
    r.command = {deg2rad(20.0), 0.0};
    b.records.push_back(r);
    s = sim::step_dynamics(s, r.command.x, 0.0, kControlDt);
  }
  // Make the join exact: a's last record is b's first.
  a.records.back().true_pose = b.records.front().true_pose;
  std::vector<hindsight::Trajectory> store{a, b};
  SpliceConfig c;
  c.eps_position = 1e-9;
  c.eps_heading = 1e-9;
  c.join_probability = 0.0;
  c.attempts = 3000;
  c.waypoints = 100;
  Rng srng = make_rng(9);
  const auto sp = splice_waypoints(store, c, srng);
  std::vector<Vec2> pa, pb;
  for (const auto& r : a.records) pa.push_back(r.true_pose.planar());
  for (const auto& r : b.records) pb.push_back(r.true_pose.planar());
  ASSERT_EQ(sp.segments.size(), 2u);
  EXPECT_EQ(sp.segments[0], (Segment{0, 0, 39}));
  EXPECT_EQ(sp.segments[1], (Segment{1, 0, 39}));
  EXPECT_NEAR(sp.path_length, polyline_length(pa) + polyline_length(pb), 1e-9);
  EXPECT_FALSE(sp.complete);
  EXPECT_FALSE(sp.warning.empty());
}

TEST(Splice, ZeroToleranceRarelyJoins) {
  const auto store = driven_store(30, 200, 10);
  SpliceConfig c;
  c.eps_position = 0.0;
  c.eps_heading = 0.0;
  Rng rng = make_rng(11);
  for (int i = 0; i < 10; ++i) {
    const auto sp = splice_waypoints(store, c, rng);
    EXPECT_EQ(sp.segments.size(), 1u);
  }
}

TEST(Splice, MissionsAreRealizableOnReplay) {
  const auto store = driven_store(60, 300, 12);
  SpliceConfig c;
  Rng rng = make_rng(13);
  int joined = 0;
  for (int m = 0; m < 10; ++m) {
    const auto sp = splice_waypoints(store, c, rng);
    ASSERT_TRUE(sp.complete) << sp.warning;
    ASSERT_EQ(sp.mission.waypoints.size(), 10u);
    EXPECT_EQ(sp.mission.world_seed, 77u);
    EXPECT_EQ(sp.start.pose, store[sp.segments[0].trajectory].records[sp.segments[0].begin].true_pose);
    joined += sp.segments.size() > 1;
    for (std::size_t k = 1; k < sp.segments.size(); ++k) {
      const auto& prev = store[sp.segments[k - 1].trajectory].records[sp.segments[k - 1].end].true_pose;
      const auto& next = store[sp.segments[k].trajectory].records[sp.segments[k].begin].true_pose;
      EXPECT_LE((prev.planar() - next.planar()).norm(), c.eps_position);
      EXPECT_LE(std::abs(wrap_angle(prev.yaw - next.yaw)), c.eps_heading);
      EXPECT_GE(sp.segments[k - 1].end - sp.segments[k - 1].begin, c.min_segment_steps);
    }
    const auto replay = replay_spliced(store, sp);
    ASSERT_EQ(replay.waypoint_distance.size(), 10u);
    EXPECT_LE(replay.max_distance, c.eps_position + c.threshold);
  }
  EXPECT_GT(joined, 0);
}

TEST(Splice, SkipsCollisionsAndRejectsEmptyStores) {
  auto store = driven_store(4, 100, 14);
  for (auto& t : store) t.collision = true;
  SpliceConfig c;
  Rng rng = make_rng(15);
  EXPECT_THROW(splice_waypoints(store, c, rng), std::invalid_argument);
  store[2].collision = false;
  const auto sp = splice_waypoints(store, c, rng);
  for (const auto& s : sp.segments) EXPECT_EQ(s.trajectory, 2u);
}
