#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "nav2goal/action_decoder.hpp"
#include "nav2goal/checkpoint.hpp"
#include "nav2goal/gradient_check.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/trainer.hpp"
#include "test_support.hpp"

using namespace nav2goal;
using namespace nav2goal::net;
using testsupport::random_observation;
using testsupport::tiny_arch;

namespace {

// Straight-line forward pass written from the layer definitions, used as an oracle.
ActionHeads reference_forward(const PolicyNetwork& net, const sim::Observation& obs, const std::optional<Vec2>& goal) {
  const auto& a = net.arch();
  const auto P = net.params();
  auto blk = [&](const char* name) { return P.data() + net.block(name).offset; };
  const int W = a.obs_width, H = a.obs_height, K = a.kernel, S = a.stride, pad = a.padding;

  std::vector<std::vector<std::vector<double>>> x(4, std::vector<std::vector<double>>(H, std::vector<double>(W)));
  for (int r = 0; r < H; ++r) {
    for (int c = 0; c < W; ++c) {
      x[0][r][c] = obs.at(r, c) == sim::ViewClass::coral;
      x[1][r][c] = obs.at(r, c) == sim::ViewClass::sand;
      x[2][r][c] = obs.at(r, c) == sim::ViewClass::obstacle;
      x[3][r][c] = obs.distance[obs.cell_index(r, c)];
    }
  }
  auto conv = [&](const std::vector<std::vector<std::vector<double>>>& in, const double* w, const double* b, int cout) {
    const int cin = static_cast<int>(in.size()), ih = static_cast<int>(in[0].size()), iw = static_cast<int>(in[0][0].size());
    const int oh = (ih + 2 * pad - K) / S + 1, ow = (iw + 2 * pad - K) / S + 1;
    std::vector<std::vector<std::vector<double>>> out(cout, std::vector<std::vector<double>>(oh, std::vector<double>(ow)));
    for (int o = 0; o < cout; ++o) {
      for (int r = 0; r < oh; ++r) {
        for (int c = 0; c < ow; ++c) {
          double acc = b[o];
          for (int i = 0; i < cin; ++i) {
            for (int kr = 0; kr < K; ++kr) {
              for (int kc = 0; kc < K; ++kc) {
                const int rr = r * S + kr - pad, cc = c * S + kc - pad;
                if (rr < 0 || cc < 0 || rr >= ih || cc >= iw) continue;
                acc += w[((o * cin + i) * K + kr) * K + kc] * in[i][rr][cc];
              }
            }
          }
          out[o][r][c] = std::max(acc, 0.0);
        }
      }
    }
    return out;
  };
  const auto c1 = conv(x, blk("conv1.weight"), blk("conv1.bias"), a.conv1_channels);
  const auto c2 = conv(c1, blk("conv2.weight"), blk("conv2.bias"), a.conv2_channels);
  std::vector<double> flat;
  for (const auto& ch : c2) {
    for (const auto& row : ch) flat.insert(flat.end(), row.begin(), row.end());
  }
  std::vector<double> h(a.hidden);
  for (int j = 0; j < a.hidden; ++j) {
    double acc = blk("fc.bias")[j];
    for (std::size_t i = 0; i < flat.size(); ++i) acc += blk("fc.weight")[j * flat.size() + i] * flat[i];
    h[j] = std::max(acc, 0.0);
  }
  std::vector<double> fused = h;
  if (goal) {
    const double gx = goal->x / a.goal_scale, gy = goal->y / a.goal_scale;
    std::vector<double> e(a.hidden);
    for (int j = 0; j < a.hidden; ++j) e[j] = blk("goal.bias")[j] + blk("goal.weight")[2 * j] * gx + blk("goal.weight")[2 * j + 1] * gy;
    if (a.fusion == GoalFusion::multiply) {
      for (int j = 0; j < a.hidden; ++j) fused[j] = h[j] * e[j];
    } else {
      fused.insert(fused.end(), e.begin(), e.end());
    }
  }
  auto head = [&](const char* w, const char* b) {
    Distribution logits{}, p{};
    for (int k = 0; k < kNumClasses; ++k) {
      logits[k] = blk(b)[k];
      for (std::size_t j = 0; j < fused.size(); ++j) logits[k] += blk(w)[k * fused.size() + j] * fused[j];
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double z = 0.0;
    for (int k = 0; k < kNumClasses; ++k) z += std::exp(logits[k] - m);
    for (int k = 0; k < kNumClasses; ++k) p[k] = std::exp(logits[k] - m) / z;
    return p;
  };
  return {head("yaw.weight", "yaw.bias"), head("pitch.weight", "pitch.bias")};
}

double sum(const Distribution& d) { return std::accumulate(d.begin(), d.end(), 0.0); }

std::vector<Example> make_batch(const std::vector<sim::Observation>& obs, Rng& rng, bool with_goal) {
  std::vector<Example> batch;
  for (const auto& o : obs) {
    Example e{&o, std::nullopt, {uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)}};
    if (with_goal) e.goal = Vec2{uniform(rng, -8, 8), uniform(rng, -8, 8)};
    batch.push_back(e);
  }
  return batch;
}

}  // namespace

TEST(Forward, HeadsAreDistributions) {
  Rng rng = make_rng(1);
  PolicyNetwork net;
  for (int t = 0; t < 20; ++t) {
    net.initialize(rng);
    for (auto& p : net.params()) p *= 3.0;
    const auto obs = random_observation(32, 24, rng);
    const auto h = net.forward(obs, std::nullopt);
    EXPECT_NEAR(sum(h.yaw), 1.0, 1e-6);
    EXPECT_NEAR(sum(h.pitch), 1.0, 1e-6);
    for (int k = 0; k < kNumClasses; ++k) EXPECT_GE(std::min(h.yaw[k], h.pitch[k]), 0.0);
  }
}

TEST(Forward, MatchesReferenceWithConstantWeights) {
  Rng rng = make_rng(2);
  for (auto fusion : {GoalFusion::none, GoalFusion::multiply, GoalFusion::concatenate}) {
    Architecture a;
    a.fusion = fusion;
    PolicyNetwork net(a);
    std::fill(net.params().begin(), net.params().end(), 0.01);
    const auto obs = random_observation(32, 24, rng);
    std::optional<Vec2> goal;
    if (fusion != GoalFusion::none) goal = Vec2{3.0, -2.0};
    const auto got = net.forward(obs, goal);
    const auto want = reference_forward(net, obs, goal);
    for (int k = 0; k < kNumClasses; ++k) {
      EXPECT_NEAR(got.yaw[k], want.yaw[k], 1e-12);
      EXPECT_NEAR(got.pitch[k], want.pitch[k], 1e-12);
    }
  }
}

TEST(Forward, MatchesReferenceWithRandomWeights) {
  Rng rng = make_rng(3);
  Architecture a;
  a.fusion = GoalFusion::multiply;
  PolicyNetwork net(a);
  net.initialize(rng);
  const auto obs = random_observation(32, 24, rng);
  const auto got = net.forward(obs, Vec2{-1.0, 4.0});
  const auto want = reference_forward(net, obs, Vec2{-1.0, 4.0});
  for (int k = 0; k < kNumClasses; ++k) EXPECT_NEAR(got.yaw[k], want.yaw[k], 1e-12);
}

TEST(Forward, UnitGoalBranchReproducesGoalFreePass) {
  Rng rng = make_rng(4);
  PolicyNetwork plain;
  plain.initialize(rng);
  Architecture a;
  a.fusion = GoalFusion::multiply;
  PolicyNetwork gc(a);
  gc.initialize(rng);
  gc.copy_matching(plain);
  const auto& w = gc.block("goal.weight");
  const auto& b = gc.block("goal.bias");
  std::fill_n(gc.params().begin() + w.offset, w.size, 0.0);
  std::fill_n(gc.params().begin() + b.offset, b.size, 1.0);
  for (int t = 0; t < 5; ++t) {
    const auto obs = random_observation(32, 24, rng);
    const auto x = plain.forward(obs, std::nullopt);
    const auto y = gc.forward(obs, Vec2{uniform(rng, -9, 9), uniform(rng, -9, 9)});
    EXPECT_EQ(x.yaw, y.yaw);
    EXPECT_EQ(x.pitch, y.pitch);
  }
}

TEST(Forward, ZeroRateDropoutIsBitExact) {
  Rng rng = make_rng(5);
  PolicyNetwork net;
  net.initialize(rng);
  const auto obs = random_observation(32, 24, rng);
  const auto mask = sample_dropout_mask(net.arch().hidden, 0.0, rng);
  const auto a = net.forward(obs, std::nullopt);
  const auto b = net.forward(obs, std::nullopt, &mask);
  EXPECT_EQ(a.yaw, b.yaw);
  EXPECT_EQ(a.pitch, b.pitch);
}

TEST(Forward, DropoutMaskValues) {
  Rng rng = make_rng(6);
  const auto m = sample_dropout_mask(10000, 0.25, rng);
  int dropped = 0;
  for (double v : m) {
    ASSERT_TRUE(v == 0.0 || std::abs(v - 1.0 / 0.75) < 1e-15);
    dropped += v == 0.0;
  }
  EXPECT_NEAR(dropped / 10000.0, 0.25, 0.02);
}

TEST(Forward, DimensionMismatchThrows) {
  Rng rng = make_rng(7);
  PolicyNetwork net;
  const auto small = random_observation(8, 6, rng);
  EXPECT_THROW(net.forward(small, std::nullopt), std::invalid_argument);
  const auto obs = random_observation(32, 24, rng);
  EXPECT_THROW(net.forward(obs, Vec2{1, 1}), std::invalid_argument);
  Architecture a;
  a.fusion = GoalFusion::multiply;
  EXPECT_THROW(PolicyNetwork(a).forward(obs, std::nullopt), std::invalid_argument);
}

TEST(Forward, PolarGoalEncoding) {
  Architecture a;
  a.goal_format = GoalFormat::polar;
  const auto g = encode_goal({0.0, 5.0}, a);
  EXPECT_DOUBLE_EQ(g.x, 0.5);
  EXPECT_DOUBLE_EQ(g.y, 0.5);
}

TEST(Loss, UniformPredictionCostsLogSeven) {
  Rng rng = make_rng(8);
  PolicyNetwork net(tiny_arch());
  const auto obs = random_observation(8, 6, rng);
  LossConfig c;
  c.label_smoothing = 0.0;
  c.entropy_weight = 0.0;
  c.weight_decay = 0.0;
  c.use_pitch = false;
  const std::vector<Example> batch{{&obs, std::nullopt, {2, 0}}};
  EXPECT_NEAR(compute_loss(net, batch, c).total, std::log(7.0), 1e-12);
  EXPECT_NEAR(std::log(7.0), 1.9459, 1e-4);
}

TEST(Loss, EntropyPenaltyLowersLossByWeightedEntropy) {
  Rng rng = make_rng(9);
  PolicyNetwork net(tiny_arch());
  const double eps = 0.1;
  const auto target_yaw = smoothed_label(1, eps);
  const auto target_pitch = smoothed_label(-2, eps);
  for (int k = 0; k < kNumClasses; ++k) {
    net.params()[net.block("yaw.bias").offset + k] = std::log(target_yaw[k]);
    net.params()[net.block("pitch.bias").offset + k] = std::log(target_pitch[k]);
  }
  const auto obs = random_observation(8, 6, rng);
  const std::vector<Example> batch{{&obs, std::nullopt, {1, -2}}};
  LossConfig base;
  base.label_smoothing = eps;
  base.entropy_weight = 0.0;
  base.weight_decay = 0.0;
  LossConfig pen = base;
  pen.entropy_weight = 0.05;
  const double l0 = compute_loss(net, batch, base).total;
  const double l1 = compute_loss(net, batch, pen).total;
  EXPECT_LT(l1, l0);
  EXPECT_NEAR(l0 - l1, 0.05 * (entropy(target_yaw) + entropy(target_pitch)), 1e-12);
}

TEST(Loss, SmoothedLabelValues) {
  const auto t = smoothed_label(0, 0.1);
  EXPECT_NEAR(t[class_to_index(0)], 0.9 + 0.1 / 7.0, 1e-15);
  EXPECT_NEAR(t[class_to_index(0)], 0.9143, 1e-4);
  EXPECT_NEAR(t[class_to_index(3)], 0.0143, 1e-4);
  EXPECT_NEAR(sum(t), 1.0, 1e-15);
}

TEST(Loss, EmptyBatchThrows) {
  PolicyNetwork net(tiny_arch());
  EXPECT_THROW(compute_loss(net, {}, LossConfig{}), std::invalid_argument);
}

TEST(Loss, WeightDecayOnlyGradient) {
  Rng rng = make_rng(10);
  PolicyNetwork net(tiny_arch(GoalFusion::multiply));
  net.initialize(rng);
  const auto obs = random_observation(8, 6, rng);
  const std::vector<Example> batch{{&obs, Vec2{1.0, 2.0}, {0, 0}}};
  LossConfig c;
  c.use_yaw = c.use_pitch = false;
  c.weight_decay = 0.003;
  const auto r = compute_loss(net, batch, c);
  for (const auto& b : net.blocks()) {
    for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
      ASSERT_EQ(r.grad[i], b.is_weight ? 2.0 * 0.003 * net.params()[i] : 0.0) << b.name;
    }
  }
}

TEST(Loss, HeadSymmetryUnderLabelSwap) {
  Rng rng = make_rng(11);
  PolicyNetwork net(tiny_arch());
  std::vector<sim::Observation> obs;
  for (int i = 0; i < 4; ++i) obs.push_back(random_observation(8, 6, rng));
  std::vector<Example> batch, swapped;
  for (const auto& o : obs) {
    const ActionLabel l{uniform_int(rng, -3, 3), uniform_int(rng, -3, 3)};
    batch.push_back({&o, std::nullopt, l});
    swapped.push_back({&o, std::nullopt, {l.pitch_class, l.yaw_class}});
  }
  const auto a = compute_loss(net, batch, LossConfig{});
  const auto b = compute_loss(net, swapped, LossConfig{});
  auto norm = [&](const LossResult& r, const char* w, const char* bias) {
    double s = 0.0;
    for (const char* name : {w, bias}) {
      const auto& blk = net.block(name);
      for (std::size_t i = blk.offset; i < blk.offset + blk.size; ++i) s += r.grad[i] * r.grad[i];
    }
    return std::sqrt(s);
  };
  EXPECT_NEAR(norm(a, "yaw.weight", "yaw.bias"), norm(b, "pitch.weight", "pitch.bias"), 1e-12);
  EXPECT_NEAR(norm(a, "pitch.weight", "pitch.bias"), norm(b, "yaw.weight", "yaw.bias"), 1e-12);
}

TEST(Loss, PermutingClassesTogetherLeavesLossUnchanged) {
  Rng rng = make_rng(12);
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  std::vector<sim::Observation> obs;
  for (int i = 0; i < 6; ++i) obs.push_back(random_observation(8, 6, rng));
  auto batch = make_batch(obs, rng, false);
  std::array<int, kNumClasses> perm{};
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  PolicyNetwork permuted = net;
  const int hin = net.arch().head_inputs();
  for (const char* head : {"yaw", "pitch"}) {
    const auto& w = net.block(std::string(head) + ".weight");
    const auto& b = net.block(std::string(head) + ".bias");
    for (int k = 0; k < kNumClasses; ++k) {
      for (int j = 0; j < hin; ++j) permuted.params()[w.offset + perm[k] * hin + j] = net.params()[w.offset + k * hin + j];
      permuted.params()[b.offset + perm[k]] = net.params()[b.offset + k];
    }
  }
  auto moved = batch;
  for (auto& e : moved) {
    e.label.yaw_class = index_to_class(perm[class_to_index(e.label.yaw_class)]);
    e.label.pitch_class = index_to_class(perm[class_to_index(e.label.pitch_class)]);
  }
  EXPECT_NEAR(compute_loss(net, batch, LossConfig{}).total, compute_loss(permuted, moved, LossConfig{}).total, 1e-10);
}

TEST(GradientCheck, TinyNetFourSamples) {
  Rng rng = make_rng(13);
  for (auto fusion : {GoalFusion::none, GoalFusion::multiply, GoalFusion::concatenate}) {
    PolicyNetwork net(tiny_arch(fusion));
    net.initialize(rng);
    std::vector<sim::Observation> obs;
    for (int i = 0; i < 4; ++i) obs.push_back(random_observation(8, 6, rng));
    const auto batch = make_batch(obs, rng, fusion != GoalFusion::none);
    std::vector<DropoutMask> masks;
    for (int i = 0; i < 4; ++i) masks.push_back(sample_dropout_mask(net.arch().hidden, 0.3, rng));
    const auto r = gradient_check(net, batch, LossConfig{}, 1e-5, &masks);
    EXPECT_LT(r.max_relative_error, 1e-4) << to_string(fusion) << " worst index " << r.worst_index;
    EXPECT_EQ(r.checked, net.param_count());
  }
}

TEST(GradientCheck, DoesNotModifyParameters) {
  Rng rng = make_rng(14);
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  const std::vector<double> before(net.params().begin(), net.params().end());
  std::vector<sim::Observation> obs{random_observation(8, 6, rng)};
  gradient_check(net, make_batch(obs, rng, false), LossConfig{});
  EXPECT_TRUE(std::equal(before.begin(), before.end(), net.params().begin()));
}

namespace {

// Coral on the left half is labelled yaw +2, on the right half yaw -2.
std::vector<sim::Observation> two_scene_set(int n, Rng& rng, std::vector<ActionLabel>& labels) {
  std::vector<sim::Observation> out;
  for (int i = 0; i < n; ++i) {
    auto o = random_observation(8, 6, rng);
    const bool left = i % 2 == 0;
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 8; ++c) {
        const bool coral = (c < 4) == left && uniform01(rng) < 0.7;
        if (coral) o.cell_class[o.cell_index(r, c)] = sim::ViewClass::coral;
        else if (o.cell_class[o.cell_index(r, c)] == sim::ViewClass::coral) o.cell_class[o.cell_index(r, c)] = sim::ViewClass::sand;
      }
    }
    out.push_back(o);
    labels.push_back({left ? 2 : -2, 0});
  }
  return out;
}

}  // namespace

TEST(Train, TwoSceneToySetIsLearned) {
  Rng rng = make_rng(15);
  std::vector<ActionLabel> labels;
  const auto obs = two_scene_set(200, rng, labels);
  std::vector<Example> train_ex, val_ex;
  for (int i = 0; i < 200; ++i) (i < 160 ? train_ex : val_ex).push_back({&obs[i], std::nullopt, labels[i]});
  auto arch = tiny_arch();
  arch.hidden = 16;
  PolicyNetwork net(arch);
  net.initialize(rng);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.batch_size = 16;
  cfg.learning_rate = 3e-3;
  FrameBatchSource src(train_ex);
  const auto report = train(net, src, val_ex, cfg, rng);
  ASSERT_EQ(report.epochs.size(), 50u);
  EXPECT_GE(report.epochs.back().val_yaw_acc, 0.95);
  EXPECT_EQ(report.train_examples, 160u);
}

TEST(Train, ZeroLearningRateLeavesParameters) {
  Rng rng = make_rng(16);
  std::vector<ActionLabel> labels;
  const auto obs = two_scene_set(40, rng, labels);
  std::vector<Example> ex;
  for (int i = 0; i < 40; ++i) ex.push_back({&obs[i], std::nullopt, labels[i]});
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  const std::vector<double> before(net.params().begin(), net.params().end());
  TrainConfig cfg;
  cfg.learning_rate = 0.0;
  cfg.epochs = 3;
  FrameBatchSource src(ex);
  const auto r = train(net, src, ex, cfg, rng);
  EXPECT_TRUE(std::equal(before.begin(), before.end(), net.params().begin()));
  for (const auto& e : r.epochs) {
    EXPECT_EQ(e.val_yaw_acc, r.initial_val_yaw_acc);
    EXPECT_EQ(e.val_pitch_acc, r.initial_val_pitch_acc);
  }
}

TEST(Train, NonFiniteLossAbortsWithDiagnostics) {
  Rng rng = make_rng(17);
  const auto obs = random_observation(8, 6, rng);
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  net.params()[net.block("yaw.bias").offset] = std::numeric_limits<double>::infinity();
  std::vector<Example> ex{{&obs, std::nullopt, {0, 0}}};
  FrameBatchSource src(ex);
  TrainConfig cfg;
  cfg.epochs = 1;
  try {
    train(net, src, ex, cfg, rng);
    FAIL() << "expected TrainingError";
  } catch (const TrainingError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos);
  }
}

TEST(Train, SplitKeepsTrajectoriesWhole) {
  Rng rng = make_rng(18);
  const auto s = split_by_trajectory(50, 0.2, rng);
  EXPECT_EQ(s.validation.size(), 10u);
  EXPECT_EQ(s.train.size(), 40u);
  std::vector<std::size_t> all = s.train;
  all.insert(all.end(), s.validation.begin(), s.validation.end());
  std::sort(all.begin(), all.end());
  for (std::size_t i = 0; i < 50; ++i) EXPECT_EQ(all[i], i);
}

TEST(Train, ConfigValidation) {
  TrainConfig c;
  c.loss.label_smoothing = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.validation_split = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.loss.weight_decay = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.final_lr_fraction = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Train, FrozenBlocksStayFixed) {
  Rng rng = make_rng(19);
  std::vector<ActionLabel> labels;
  const auto obs = two_scene_set(40, rng, labels);
  std::vector<Example> ex;
  for (int i = 0; i < 40; ++i) ex.push_back({&obs[i], std::nullopt, labels[i]});
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  const std::vector<double> before(net.params().begin(), net.params().end());
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.final_lr_fraction = 0.1;
  cfg.frozen = {"conv1.weight", "fc.bias"};
  FrameBatchSource src(ex);
  train(net, src, ex, cfg, rng);
  for (const auto& b : net.blocks()) {
    const bool frozen = b.name == "conv1.weight" || b.name == "fc.bias";
    const bool same = std::equal(before.begin() + b.offset, before.begin() + b.offset + b.size,
                                 net.params().begin() + b.offset);
    EXPECT_EQ(same, frozen) << b.name;
  }
}

TEST(Decoder, ZeroClassGivesZeroRates) {
  ActionDecoder d;
  const auto r = d.decode({one_hot(0), one_hot(0)});
  EXPECT_EQ(r.yaw_rate, 0.0);
  EXPECT_EQ(r.pitch_rate, 0.0);
}

TEST(Decoder, SaturatedClassWithoutSmoothing) {
  DecoderConfig c;
  c.beta = 0.0;
  ActionDecoder d(c);
  const auto r = d.decode({one_hot(3), one_hot(-1)});
  EXPECT_NEAR(r.yaw_rate, deg2rad(30.0), 1e-15);
  EXPECT_NEAR(r.pitch_rate, deg2rad(-10.0), 1e-15);
}

TEST(Decoder, SmoothingConvergesToRaw) {
  ActionDecoder d;
  ActionHeads h{uniform_distribution(), one_hot(2)};
  h.yaw[class_to_index(3)] += 0.3;
  for (auto& p : h.yaw) p /= 1.3;
  RateCommand r;
  for (int i = 0; i < 50; ++i) r = d.decode(h);
  EXPECT_NEAR(r.yaw_rate, d.raw(h).yaw_rate, 1e-6);
  EXPECT_NEAR(r.pitch_rate, d.raw(h).pitch_rate, 1e-6);
}

TEST(Decoder, EmaRecurrence) {
  ActionDecoder d;
  const auto first = d.decode({one_hot(3), one_hot(0)});
  EXPECT_NEAR(first.yaw_rate, 0.4 * deg2rad(30.0), 1e-15);
  const auto second = d.decode({one_hot(3), one_hot(0)});
  EXPECT_NEAR(second.yaw_rate, 0.6 * first.yaw_rate + 0.4 * deg2rad(30.0), 1e-15);
}

TEST(Decoder, ArgmaxMode) {
  DecoderConfig c;
  c.beta = 0.0;
  c.use_argmax = true;
  ActionDecoder d(c);
  Distribution p{0.1, 0.1, 0.1, 0.1, 0.1, 0.35, 0.15};
  EXPECT_NEAR(d.decode({p, one_hot(0)}).yaw_rate, deg2rad(20.0), 1e-15);
}

TEST(Checkpoint, RoundTripIsExactAfterQuantization) {
  Rng rng = make_rng(19);
  Architecture a;
  a.fusion = GoalFusion::concatenate;
  a.goal_format = GoalFormat::polar;
  PolicyNetwork net(a);
  net.initialize(rng);
  quantize_to_float(net);
  const auto dir = testsupport::scratch_dir("ckpt");
  save_checkpoint(dir / "p.ckpt", net);
  const auto back = load_checkpoint(dir / "p.ckpt");
  EXPECT_EQ(back.arch(), net.arch());
  EXPECT_TRUE(std::equal(net.params().begin(), net.params().end(), back.params().begin()));
  EXPECT_FALSE(std::filesystem::exists(dir / "p.ckpt.partial"));
}

TEST(Checkpoint, RejectsCorruption) {
  Rng rng = make_rng(20);
  PolicyNetwork net(tiny_arch());
  net.initialize(rng);
  const auto dir = testsupport::scratch_dir("ckpt_bad");
  save_checkpoint(dir / "p.ckpt", net);
  const auto size = std::filesystem::file_size(dir / "p.ckpt");
  std::filesystem::copy_file(dir / "p.ckpt", dir / "t.ckpt");
  std::filesystem::resize_file(dir / "t.ckpt", size - 3);
  EXPECT_THROW(load_checkpoint(dir / "t.ckpt"), std::exception);
  {
    std::fstream f(dir / "p.ckpt", std::ios::in | std::ios::out | std::ios::binary);
    f.put('X');
  }
  EXPECT_THROW(load_checkpoint(dir / "p.ckpt"), CheckpointError);
}
