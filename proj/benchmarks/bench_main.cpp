#include <benchmark/benchmark.h>

#include <vector>

#include "nav2goal/ekf.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/observation.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/world.hpp"

using namespace nav2goal;

namespace {

const sim::World& bench_world() {
  static const sim::World world = sim::generate_world(7, sim::WorldParams{});
  return world;
}

Pose survey_pose() {
  const auto& w = bench_world();
  Pose p{20.0, 20.0, 0.0, 0.6, 0.0};
  p.z = w.floor_depth_at(p.x, p.y) - 3.0;
  return p;
}

net::PolicyNetwork make_net(net::GoalFusion fusion) {
  net::Architecture a;
  a.fusion = fusion;
  net::PolicyNetwork n(a);
  auto rng = make_rng(1);
  n.initialize(rng);
  return n;
}

}  // namespace

static void BM_RenderObservation(benchmark::State& state) {
  const auto& w = bench_world();
  const Pose p = survey_pose();
  for (auto _ : state) benchmark::DoNotOptimize(sim::render_observation(w, p));
}
BENCHMARK(BM_RenderObservation);

static void BM_Forward(benchmark::State& state) {
  const auto fusion = static_cast<net::GoalFusion>(state.range(0));
  const auto n = make_net(fusion);
  const auto obs = sim::render_observation(bench_world(), survey_pose());
  const std::optional<Vec2> goal = fusion == net::GoalFusion::none ? std::nullopt : std::optional<Vec2>(Vec2(4.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(n.forward(obs, goal));
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1)->Arg(2);

static void BM_LossAndGradient(benchmark::State& state) {
  const auto n = make_net(net::GoalFusion::multiply);
  const auto obs = sim::render_observation(bench_world(), survey_pose());
  std::vector<net::Example> batch(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    batch[i].observation = &obs;
    batch[i].goal = Vec2(3.0, static_cast<double>(i % 5) - 2.0);
    batch[i].label = {static_cast<int>(i % 7) - 3, 0};
  }
  for (auto _ : state) benchmark::DoNotOptimize(net::compute_loss(n, batch, net::LossConfig{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LossAndGradient)->Arg(1)->Arg(32);

static void BM_EkfCycle(benchmark::State& state) {
  const est::EkfNoise noise;
  const double dt = 1.0 / 6.0;
  const auto q = est::process_noise(noise, dt);
  est::EkfState s;
  for (auto _ : state) {
    s = est::ekf_predict(s, 0.05, dt, q);
    est::update_compass(s, s.mean(est::kYaw), noise.r_compass);
    est::update_depth(s, s.mean(est::kZ), noise.r_depth);
    benchmark::DoNotOptimize(s.cov);
  }
}
BENCHMARK(BM_EkfCycle);
BENCHMARK_MAIN();
