#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nav2goal/observation.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::net {

enum class GoalFusion : std::uint32_t { none = 0, multiply = 1, concatenate = 2 };
enum class GoalFormat : std::uint32_t { cartesian = 0, polar = 1 };

GoalFusion parse_fusion(const std::string& s);
std::string to_string(GoalFusion f);
GoalFormat parse_goal_format(const std::string& s);
std::string to_string(GoalFormat f);

/// Network input channels, in order. Open water is implied by the other three.
inline constexpr sim::ViewClass kInputClasses[3] = {sim::ViewClass::coral, sim::ViewClass::sand,
                                                    sim::ViewClass::obstacle};

struct Architecture {
  int obs_width = 32;
  int obs_height = 24;
  int in_channels = 4;
  int conv1_channels = 8;
  int conv2_channels = 16;
  int kernel = 3;
  int stride = 2;
  /// Zero padding on each border, both conv layers.
  int padding = 1;
  int hidden = 64;
  int classes = kNumClasses;
  GoalFusion fusion = GoalFusion::none;
  GoalFormat goal_format = GoalFormat::cartesian;
  /// Goals in metres are divided by this before entering the goal branch.
  double goal_scale = 10.0;

  int conv1_width() const { return (obs_width + 2 * padding - kernel) / stride + 1; }
  int conv1_height() const { return (obs_height + 2 * padding - kernel) / stride + 1; }
  int conv2_width() const { return (conv1_width() + 2 * padding - kernel) / stride + 1; }
  int conv2_height() const { return (conv1_height() + 2 * padding - kernel) / stride + 1; }
  int flat_size() const { return conv2_channels * conv2_width() * conv2_height(); }
  int head_inputs() const { return fusion == GoalFusion::concatenate ? 2 * hidden : hidden; }
  bool goal_conditioned() const { return fusion != GoalFusion::none; }
  void validate() const;
  bool operator==(const Architecture&) const = default;
};

/// Contiguous parameter tensor inside the flat parameter vector.
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
  /// Weights are subject to weight decay; biases are not.
  bool is_weight = true;
};

/// Per-unit multipliers applied to the hidden feature vector: 0 for dropped
/// units, 1/(1-p) for kept ones.
using DropoutMask = std::vector<double>;

DropoutMask sample_dropout_mask(int hidden, double rate, Rng& rng);

/// Input tensor, channel-major: in_channels x obs_height x obs_width.
std::vector<double> encode_observation(const sim::Observation& obs, const Architecture& arch);
/// Goal vector as seen by the goal branch (normalized, optionally polar).
Vec2 encode_goal(const Vec2& goal_m, const Architecture& arch);

struct ForwardCache {
  std::vector<double> input;
  std::vector<double> a1, a2;
  std::vector<double> z;
  std::vector<double> hidden;  // after ReLU and dropout
  std::vector<double> goal_in;
  std::vector<double> goal_embedding;
  std::vector<double> fused;
  std::vector<double> mask;
  Distribution logits_yaw{}, logits_pitch{};
  ActionHeads heads;
};

/// Two-conv, one-dense policy with 7-way yaw and pitch softmax heads and an
/// optional dense goal branch fused by elementwise product or concatenation.
///
/// Parameter order in the flat vector: conv1.weight[c1][in][k][k], conv1.bias,
/// conv2.weight[c2][c1][k][k], conv2.bias, fc.weight[hidden][flat], fc.bias,
/// goal.weight[hidden][2], goal.bias (goal-conditioned only),
/// yaw.weight[7][head_in], yaw.bias, pitch.weight[7][head_in], pitch.bias.
class PolicyNetwork {
 public:
  explicit PolicyNetwork(Architecture arch = {});

  const Architecture& arch() const { return arch_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(const std::string& name) const;
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  /// He-normal weights, zero biases; the multiplicative goal branch starts
  /// with unit bias so an untrained branch passes features through.
  void initialize(Rng& rng);
  /// Copies every block whose name and size match from another network.
  std::size_t copy_matching(const PolicyNetwork& other);

  /// goal is in metres, robot frame; mask may be null (no dropout).
  ActionHeads forward(const sim::Observation& obs, const std::optional<Vec2>& goal,
                      const DropoutMask* mask = nullptr) const;
  void forward(std::span<const double> input, const std::optional<Vec2>& goal, const DropoutMask* mask,
               ForwardCache& cache) const;
  /// Accumulates parameter gradients given dL/dlogits for both heads.
  void backward(const ForwardCache& cache, const Distribution& dlogits_yaw, const Distribution& dlogits_pitch,
                std::span<double> grad) const;

 private:
  Architecture arch_;
  std::vector<ParamBlock> blocks_;
  std::vector<double> params_;
  std::size_t conv1_w_, conv1_b_, conv2_w_, conv2_b_, fc_w_, fc_b_, goal_w_ = 0, goal_b_ = 0, yaw_w_, yaw_b_,
      pitch_w_, pitch_b_;
};

Distribution softmax(const Distribution& logits);
/// (1 - eps) * one_hot + eps / 7.
Distribution smoothed_label(int cls, double eps);

struct LossConfig {
  double label_smoothing = 0.1;
  /// Confidence-penalty weight: the loss subtracts entropy_weight * H(f) per head.
  double entropy_weight = 0.01;
  double weight_decay = 1e-4;
  bool use_yaw = true;
  bool use_pitch = true;
};

struct Example {
  const sim::Observation* observation = nullptr;
  std::optional<Vec2> goal;
  ActionLabel label;
};

struct LossResult {
  double total = 0.0;
  double yaw_ce = 0.0;
  double pitch_ce = 0.0;
  double yaw_entropy = 0.0;
  double pitch_entropy = 0.0;
  double regularization = 0.0;
  std::vector<double> grad;
};

/// Batch loss: sum over examples of CE(smoothed, f) - lambda2 * H(f) per used head,
/// plus lambda1 * ||weights||^2. masks, when given, holds one dropout mask per example.
LossResult compute_loss(const PolicyNetwork& net, std::span<const Example> batch, const LossConfig& config,
                        const std::vector<DropoutMask>* masks = nullptr, bool want_grad = true);

/// Same loss on pre-encoded input tensors (one per example).
LossResult compute_loss_encoded(const PolicyNetwork& net, std::span<const std::vector<double>> inputs,
                                std::span<const Example> batch, const LossConfig& config,
                                const std::vector<DropoutMask>* masks, bool want_grad);

}  // namespace nav2goal::net
