#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "nav2goal/explorer.hpp"

using namespace nav2goal;
using namespace nav2goal::explore;

namespace {

Distribution random_distribution(Rng& rng, double sharpness) {
  Distribution d{};
  double z = 0;
  for (auto& p : d) {
    p = std::exp(sharpness * uniform(rng, -1, 1));
    z += p;
  }
  for (auto& p : d) p /= z;
  return d;
}

void expect_valid(const Distribution& d) {
  double s = 0;
  for (double p : d) {
    ASSERT_GE(p, 0.0);
    s += p;
  }
  ASSERT_NEAR(s, 1.0, 1e-9);
}

}  // namespace

TEST(Gate, OneHotIsExactlyZero) {
  for (int c = -3; c <= 3; ++c) EXPECT_EQ(gate_weight(one_hot(c), 1.0), 0.0);
}

TEST(Gate, UniformSevenClasses) {
  const double h = std::log(7.0);
  EXPECT_NEAR(h, 1.9459, 1e-4);
  EXPECT_NEAR(gate_weight(uniform_distribution(), 1.0), 1.0 - std::exp(-0.5 * h * h), 1e-15);
  EXPECT_NEAR(gate_weight(uniform_distribution(), 1.0), 0.8494, 1e-3);
}

TEST(Gate, WideBandwidthClosesGate) {
  Rng rng = make_rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_LT(gate_weight(random_distribution(rng, 3.0), 1e6), 1e-11);
}

TEST(Gate, MonotoneInEntropyAndBelowOne) {
  Rng rng = make_rng(2);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_distribution(rng, 5.0), b = random_distribution(rng, 5.0);
    const double wa = gate_weight(a, 1.3), wb = gate_weight(b, 1.3);
    ASSERT_LT(wa, 1.0);
    ASSERT_GE(wa, 0.0);
    if (entropy(a) < entropy(b)) ASSERT_LE(wa, wb);
  }
}

TEST(Mix, Endpoints) {
  Rng rng = make_rng(3);
  const auto f = random_distribution(rng, 2.0);
  EXPECT_EQ(mix(f, one_hot(2), 0.0), f);
  EXPECT_EQ(mix(f, one_hot(2), 1.0), one_hot(2));
}

TEST(Mix, HalfUniformHalfCommitted) {
  const auto m = mix(uniform_distribution(), one_hot(3), 0.5);
  EXPECT_NEAR(m[class_to_index(3)], 0.5714, 1e-4);
  EXPECT_NEAR(m[class_to_index(3)], 0.5 / 7 + 0.5, 1e-15);
  for (int c = -3; c < 3; ++c) EXPECT_NEAR(m[class_to_index(c)], 0.0714, 1e-4);
}

TEST(Mix, AlwaysValidDistribution) {
  Rng rng = make_rng(4);
  for (int i = 0; i < 100000; ++i) {
    const auto f = random_distribution(rng, uniform(rng, 0, 20));
    const auto g = uniform01(rng) < 0.5 ? one_hot(uniform_int(rng, -3, 3)) : random_distribution(rng, 4.0);
    expect_valid(mix(f, g, gate_weight(f, uniform(rng, 0.1, 5))));
  }
}

TEST(ExploreStep, FreshStateCommits) {
  Rng rng = make_rng(5);
  ExploreConfig c;
  const auto out = explore_step({uniform_distribution(), uniform_distribution()}, ExploreState{}, c, rng, 1.0 / 6);
  EXPECT_TRUE(out.resampled);
  EXPECT_GE(out.state.remaining, c.t_lo);
  EXPECT_LE(out.state.remaining, c.t_hi);
  EXPECT_EQ(out.state.f_expl, one_hot(out.state.committed_class));
  EXPECT_EQ(out.state.commitments, 1);
}

TEST(ExploreStep, ConfidentPolicyPassesThrough) {
  Rng rng = make_rng(6);
  ExploreState s;
  const ActionHeads h{one_hot(-2), one_hot(1)};
  for (int i = 0; i < 200; ++i) {
    const auto out = explore_step(h, s, ExploreConfig{}, rng, 1.0 / 6);
    ASSERT_EQ(out.heads.yaw, h.yaw);
    ASSERT_EQ(out.heads.pitch, h.pitch);
    s = out.state;
  }
}

TEST(ExploreStep, PitchHeadUntouched) {
  Rng rng = make_rng(7);
  ExploreState s;
  for (int i = 0; i < 200; ++i) {
    const ActionHeads h{random_distribution(rng, 1.0), random_distribution(rng, 1.0)};
    const auto out = explore_step(h, s, ExploreConfig{}, rng, 1.0 / 6);
    ASSERT_EQ(out.heads.pitch, h.pitch);
    expect_valid(out.heads.yaw);
    ASSERT_GE(out.state.remaining, 0.0);
    s = out.state;
  }
}

TEST(ExploreStep, RenewalCount) {
  Rng rng = make_rng(8);
  ExploreConfig c;
  const double dt = 1.0 / 6;
  ExploreState s;
  for (int i = 0; i < 600; ++i) s = explore_step({uniform_distribution(), uniform_distribution()}, s, c, rng, dt).state;
  const double expected = 600 * dt / (0.5 * (c.t_lo + c.t_hi));
  EXPECT_NEAR(s.commitments, expected, 0.3 * expected);
}

TEST(ExploreStep, CommittedClassFollowsPExpl) {
  Rng rng = make_rng(9);
  ExploreConfig c;
  c.p_expl = {0, 0, 0, 0, 0, 0.25, 0.75};
  std::array<int, kNumClasses> counts{};
  for (int i = 0; i < 4000; ++i) ++counts[class_to_index(explore_step({}, ExploreState{}, c, rng, 0.1).state.committed_class)];
  EXPECT_EQ(counts[0] + counts[1] + counts[2] + counts[3] + counts[4], 0);
  EXPECT_NEAR(counts[6] / 4000.0, 0.75, 0.03);
}

TEST(ExploreConfig, Validation) {
  ExploreConfig c;
  c.p_expl[0] += 0.1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.t_lo = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.t_hi = 1;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.bandwidth = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  Rng rng = make_rng(10);
  EXPECT_THROW(explore_step({}, {}, ExploreConfig{}, rng, 0.0), std::invalid_argument);
}
