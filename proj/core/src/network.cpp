#include "nav2goal/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace nav2goal::net {

GoalFusion parse_fusion(const std::string& s) {
  if (s == "none") return GoalFusion::none;
  if (s == "multiply" || s == "mul") return GoalFusion::multiply;
  if (s == "concatenate" || s == "concat") return GoalFusion::concatenate;
  throw std::invalid_argument("unknown goal fusion: " + s);
}

std::string to_string(GoalFusion f) {
  switch (f) {
    case GoalFusion::multiply:
      return "multiply";
    case GoalFusion::concatenate:
      return "concatenate";
    case GoalFusion::none:
      break;
  }
  return "none";
}

GoalFormat parse_goal_format(const std::string& s) {
  if (s == "cartesian") return GoalFormat::cartesian;
  if (s == "polar") return GoalFormat::polar;
  throw std::invalid_argument("unknown goal format: " + s);
}

std::string to_string(GoalFormat f) { return f == GoalFormat::polar ? "polar" : "cartesian"; }

void Architecture::validate() const {
  if (in_channels != 4) throw std::invalid_argument("architecture: input must have 4 channels");
  if (padding < 0 || padding >= kernel) throw std::invalid_argument("architecture: padding must lie in [0, kernel)");
  if (kernel <= 0 || stride <= 0 || conv1_channels <= 0 || conv2_channels <= 0 || hidden <= 0) {
    throw std::invalid_argument("architecture: non-positive layer size");
  }
  if (classes != kNumClasses) throw std::invalid_argument("architecture: heads must have 7 classes");
  if (conv1_width() <= 0 || conv1_height() <= 0 || conv2_width() <= 0 || conv2_height() <= 0) {
    throw std::invalid_argument("architecture: observation too small for the conv stack");
  }
  if (!(goal_scale > 0.0)) throw std::invalid_argument("architecture: goal_scale must be positive");
}

DropoutMask sample_dropout_mask(int hidden, double rate, Rng& rng) {
  DropoutMask mask(static_cast<std::size_t>(hidden), 1.0);
  if (rate <= 0.0) return mask;
  const double keep_scale = 1.0 / (1.0 - rate);
  for (auto& m : mask) m = bernoulli(rng, rate) ? 0.0 : keep_scale;
  return mask;
}

std::vector<double> encode_observation(const sim::Observation& obs, const Architecture& arch) {
  if (obs.width != arch.obs_width || obs.height != arch.obs_height) {
    throw std::invalid_argument("observation dimensions do not match the network");
  }
  const std::size_t plane = static_cast<std::size_t>(obs.width) * obs.height;
  std::vector<double> x(4 * plane, 0.0);
  for (std::size_t i = 0; i < plane; ++i) {
    const auto c = obs.cell_class[i];
    for (int k = 0; k < 3; ++k) {
      if (c == kInputClasses[k]) x[k * plane + i] = 1.0;
    }
    x[3 * plane + i] = obs.distance[i];
  }
  return x;
}

Vec2 encode_goal(const Vec2& goal_m, const Architecture& arch) {
  if (arch.goal_format == GoalFormat::polar) {
    return {goal_m.norm() / arch.goal_scale, std::atan2(goal_m.y, goal_m.x) / kPi};
  }
  return {goal_m.x / arch.goal_scale, goal_m.y / arch.goal_scale};
}

PolicyNetwork::PolicyNetwork(Architecture arch) : arch_(arch) {
  arch_.validate();
  std::size_t offset = 0;
  auto add = [&](const std::string& name, std::size_t size, bool weight) {
    blocks_.push_back({name, offset, size, weight});
    offset += size;
    return blocks_.back().offset;
  };
  const auto k2 = static_cast<std::size_t>(arch_.kernel * arch_.kernel);
  conv1_w_ = add("conv1.weight", static_cast<std::size_t>(arch_.conv1_channels) * arch_.in_channels * k2, true);
  conv1_b_ = add("conv1.bias", static_cast<std::size_t>(arch_.conv1_channels), false);
  conv2_w_ = add("conv2.weight", static_cast<std::size_t>(arch_.conv2_channels) * arch_.conv1_channels * k2, true);
  conv2_b_ = add("conv2.bias", static_cast<std::size_t>(arch_.conv2_channels), false);
  fc_w_ = add("fc.weight", static_cast<std::size_t>(arch_.hidden) * arch_.flat_size(), true);
  fc_b_ = add("fc.bias", static_cast<std::size_t>(arch_.hidden), false);
  if (arch_.goal_conditioned()) {
    goal_w_ = add("goal.weight", static_cast<std::size_t>(arch_.hidden) * 2, true);
    goal_b_ = add("goal.bias", static_cast<std::size_t>(arch_.hidden), false);
  }
  const auto head = static_cast<std::size_t>(arch_.head_inputs());
  yaw_w_ = add("yaw.weight", kNumClasses * head, true);
  yaw_b_ = add("yaw.bias", kNumClasses, false);
  pitch_w_ = add("pitch.weight", kNumClasses * head, true);
  pitch_b_ = add("pitch.bias", kNumClasses, false);
  params_.assign(offset, 0.0);
}

const ParamBlock& PolicyNetwork::block(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw std::out_of_range("no parameter block named " + name);
}

void PolicyNetwork::initialize(Rng& rng) {
  const auto k2 = arch_.kernel * arch_.kernel;
  auto fill = [&](std::size_t off, std::size_t n, double stddev) {
    std::normal_distribution<double> dist(0.0, stddev);
    for (std::size_t i = 0; i < n; ++i) params_[off + i] = dist(rng);
  };
  std::fill(params_.begin(), params_.end(), 0.0);
  fill(conv1_w_, block("conv1.weight").size, std::sqrt(2.0 / (arch_.in_channels * k2)));
  fill(conv2_w_, block("conv2.weight").size, std::sqrt(2.0 / (arch_.conv1_channels * k2)));
  fill(fc_w_, block("fc.weight").size, std::sqrt(2.0 / arch_.flat_size()));
  if (arch_.goal_conditioned()) {
    fill(goal_w_, block("goal.weight").size, std::sqrt(0.5));
    if (arch_.fusion == GoalFusion::multiply) {
      std::fill_n(params_.begin() + static_cast<std::ptrdiff_t>(goal_b_), arch_.hidden, 1.0);
    }
  }
  fill(yaw_w_, block("yaw.weight").size, std::sqrt(1.0 / arch_.head_inputs()));
  fill(pitch_w_, block("pitch.weight").size, std::sqrt(1.0 / arch_.head_inputs()));
}

std::size_t PolicyNetwork::copy_matching(const PolicyNetwork& other) {
  std::size_t copied = 0;
  for (const auto& b : blocks_) {
    for (const auto& ob : other.blocks_) {
      if (ob.name == b.name && ob.size == b.size) {
        std::copy_n(other.params_.begin() + static_cast<std::ptrdiff_t>(ob.offset), b.size,
                    params_.begin() + static_cast<std::ptrdiff_t>(b.offset));
        ++copied;
      }
    }
  }
  return copied;
}

namespace {

/// Valid (unpadded) strided convolution, channel-major tensors.
void conv_forward(const double* in, int in_c, int in_h, int in_w, const double* w, const double* b, int out_c, int k,
                  int s, double* out, int out_h, int out_w) {
  for (int o = 0; o < out_c; ++o) {
    double* out_plane = out + static_cast<std::size_t>(o) * out_h * out_w;
    std::fill_n(out_plane, out_h * out_w, b[o]);
    for (int c = 0; c < in_c; ++c) {
      const double* in_plane = in + static_cast<std::size_t>(c) * in_h * in_w;
      const double* wk = w + (static_cast<std::size_t>(o) * in_c + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = wk[ky * k + kx];
          for (int y = 0; y < out_h; ++y) {
            const double* row = in_plane + static_cast<std::size_t>(y * s + ky) * in_w + kx;
            double* orow = out_plane + static_cast<std::size_t>(y) * out_w;
            for (int x = 0; x < out_w; ++x) orow[x] += wv * row[x * s];
          }
        }
      }
    }
  }
}

void conv_backward(const double* in, int in_c, int in_h, int in_w, const double* w, int out_c, int k, int s,
                   const double* dout, int out_h, int out_w, double* dw, double* db, double* din) {
  for (int o = 0; o < out_c; ++o) {
    const double* dplane = dout + static_cast<std::size_t>(o) * out_h * out_w;
    double bsum = 0.0;
    for (int i = 0; i < out_h * out_w; ++i) bsum += dplane[i];
    db[o] += bsum;
    for (int c = 0; c < in_c; ++c) {
      const double* in_plane = in + static_cast<std::size_t>(c) * in_h * in_w;
      double* din_plane = din ? din + static_cast<std::size_t>(c) * in_h * in_w : nullptr;
      const std::size_t widx = (static_cast<std::size_t>(o) * in_c + c) * k * k;
      for (int ky = 0; ky < k; ++ky) {
        for (int kx = 0; kx < k; ++kx) {
          const double wv = w[widx + ky * k + kx];
          double acc = 0.0;
          for (int y = 0; y < out_h; ++y) {
            const std::size_t base = static_cast<std::size_t>(y * s + ky) * in_w + kx;
            const double* row = in_plane + base;
            const double* drow = dplane + static_cast<std::size_t>(y) * out_w;
            if (din_plane) {
              double* dinrow = din_plane + base;
              for (int x = 0; x < out_w; ++x) {
                acc += drow[x] * row[x * s];
                dinrow[x * s] += drow[x] * wv;
              }
            } else {
              for (int x = 0; x < out_w; ++x) acc += drow[x] * row[x * s];
            }
          }
          dw[widx + ky * k + kx] += acc;
        }
      }
    }
  }
}

/// Copies a C x H x W tensor into a zero-bordered C x (H+2p) x (W+2p) tensor.
std::vector<double> pad_tensor(const double* in, int c, int h, int w, int p) {
  const int hp = h + 2 * p, wp = w + 2 * p;
  std::vector<double> out(static_cast<std::size_t>(c) * hp * wp, 0.0);
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(in + (static_cast<std::size_t>(ch) * h + y) * w, w,
                  out.begin() + static_cast<std::ptrdiff_t>((static_cast<std::size_t>(ch) * hp + y + p) * wp + p));
    }
  }
  return out;
}

/// Inverse of pad_tensor for gradients: drops the border.
void unpad_tensor(const double* in, int c, int h, int w, int p, double* out) {
  const int hp = h + 2 * p, wp = w + 2 * p;
  for (int ch = 0; ch < c; ++ch) {
    for (int y = 0; y < h; ++y) {
      std::copy_n(in + (static_cast<std::size_t>(ch) * hp + y + p) * wp + p, w,
                  out + (static_cast<std::size_t>(ch) * h + y) * w);
    }
  }
}

}  // namespace

void PolicyNetwork::forward(std::span<const double> input, const std::optional<Vec2>& goal, const DropoutMask* mask,
                            ForwardCache& cache) const {
  const auto& a = arch_;
  if (input.size() != static_cast<std::size_t>(4 * a.obs_width * a.obs_height)) {
    throw std::invalid_argument("forward: input tensor size mismatch");
  }
  if (a.goal_conditioned() != goal.has_value()) {
    throw std::invalid_argument(a.goal_conditioned() ? "forward: goal-conditioned network needs a goal"
                                                     : "forward: goal given to a goal-free network");
  }
  if (mask && mask->size() != static_cast<std::size_t>(a.hidden)) {
    throw std::invalid_argument("forward: dropout mask size mismatch");
  }
  const double* p = params_.data();
  const int h1 = a.conv1_height(), w1 = a.conv1_width(), h2 = a.conv2_height(), w2 = a.conv2_width();
  cache.input.assign(input.begin(), input.end());
  cache.a1.resize(static_cast<std::size_t>(a.conv1_channels) * h1 * w1);
  cache.a2.resize(static_cast<std::size_t>(a.conv2_channels) * h2 * w2);
  const int pad = a.padding;
  {
    const auto x = pad_tensor(cache.input.data(), a.in_channels, a.obs_height, a.obs_width, pad);
    conv_forward(x.data(), a.in_channels, a.obs_height + 2 * pad, a.obs_width + 2 * pad, p + conv1_w_, p + conv1_b_,
                 a.conv1_channels, a.kernel, a.stride, cache.a1.data(), h1, w1);
  }
  std::vector<double> r1(cache.a1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) r1[i] = cache.a1[i] > 0.0 ? cache.a1[i] : 0.0;
  {
    const auto x = pad_tensor(r1.data(), a.conv1_channels, h1, w1, pad);
    conv_forward(x.data(), a.conv1_channels, h1 + 2 * pad, w1 + 2 * pad, p + conv2_w_, p + conv2_b_, a.conv2_channels,
                 a.kernel, a.stride, cache.a2.data(), h2, w2);
  }
  const int flat = a.flat_size();
  cache.z.resize(static_cast<std::size_t>(a.hidden));
  cache.hidden.resize(static_cast<std::size_t>(a.hidden));
  for (int j = 0; j < a.hidden; ++j) {
    const double* wrow = p + fc_w_ + static_cast<std::size_t>(j) * flat;
    double acc = p[fc_b_ + j];
    for (int i = 0; i < flat; ++i) {
      const double v = cache.a2[i];
      if (v > 0.0) acc += wrow[i] * v;
    }
    cache.z[j] = acc;
    const double relu = acc > 0.0 ? acc : 0.0;
    cache.hidden[j] = mask ? relu * (*mask)[j] : relu;
  }
  cache.mask = mask ? *mask : DropoutMask{};

  const int head_in = a.head_inputs();
  cache.fused.resize(static_cast<std::size_t>(head_in));
  if (a.goal_conditioned()) {
    const Vec2 g = encode_goal(*goal, a);
    cache.goal_in = {g.x, g.y};
    cache.goal_embedding.resize(static_cast<std::size_t>(a.hidden));
    for (int j = 0; j < a.hidden; ++j) {
      cache.goal_embedding[j] = p[goal_b_ + j] + p[goal_w_ + 2 * j] * g.x + p[goal_w_ + 2 * j + 1] * g.y;
    }
    if (a.fusion == GoalFusion::multiply) {
      for (int j = 0; j < a.hidden; ++j) cache.fused[j] = cache.hidden[j] * cache.goal_embedding[j];
    } else {
      std::copy(cache.hidden.begin(), cache.hidden.end(), cache.fused.begin());
      std::copy(cache.goal_embedding.begin(), cache.goal_embedding.end(), cache.fused.begin() + a.hidden);
    }
  } else {
    cache.goal_in.clear();
    cache.goal_embedding.clear();
    std::copy(cache.hidden.begin(), cache.hidden.end(), cache.fused.begin());
  }

  for (int c = 0; c < kNumClasses; ++c) {
    double ly = p[yaw_b_ + c];
    double lp = p[pitch_b_ + c];
    const double* wy = p + yaw_w_ + static_cast<std::size_t>(c) * head_in;
    const double* wp = p + pitch_w_ + static_cast<std::size_t>(c) * head_in;
    for (int j = 0; j < head_in; ++j) {
      ly += wy[j] * cache.fused[j];
      lp += wp[j] * cache.fused[j];
    }
    cache.logits_yaw[c] = ly;
    cache.logits_pitch[c] = lp;
  }
  cache.heads.yaw = softmax(cache.logits_yaw);
  cache.heads.pitch = softmax(cache.logits_pitch);
}

ActionHeads PolicyNetwork::forward(const sim::Observation& obs, const std::optional<Vec2>& goal,
                                   const DropoutMask* mask) const {
  const auto x = encode_observation(obs, arch_);
  ForwardCache cache;
  forward(x, goal, mask, cache);
  return cache.heads;
}

void PolicyNetwork::backward(const ForwardCache& cache, const Distribution& dly, const Distribution& dlp,
                             std::span<double> grad) const {
  const auto& a = arch_;
  const double* p = params_.data();
  double* g = grad.data();
  const int head_in = a.head_inputs();
  std::vector<double> dfused(static_cast<std::size_t>(head_in), 0.0);
  for (int c = 0; c < kNumClasses; ++c) {
    const double* wy = p + yaw_w_ + static_cast<std::size_t>(c) * head_in;
    const double* wp = p + pitch_w_ + static_cast<std::size_t>(c) * head_in;
    double* gy = g + yaw_w_ + static_cast<std::size_t>(c) * head_in;
    double* gp = g + pitch_w_ + static_cast<std::size_t>(c) * head_in;
    g[yaw_b_ + c] += dly[c];
    g[pitch_b_ + c] += dlp[c];
    for (int j = 0; j < head_in; ++j) {
      gy[j] += dly[c] * cache.fused[j];
      gp[j] += dlp[c] * cache.fused[j];
      dfused[j] += dly[c] * wy[j] + dlp[c] * wp[j];
    }
  }

  std::vector<double> dhidden(static_cast<std::size_t>(a.hidden));
  if (a.goal_conditioned()) {
    std::vector<double> demb(static_cast<std::size_t>(a.hidden));
    if (a.fusion == GoalFusion::multiply) {
      for (int j = 0; j < a.hidden; ++j) {
        dhidden[j] = dfused[j] * cache.goal_embedding[j];
        demb[j] = dfused[j] * cache.hidden[j];
      }
    } else {
      for (int j = 0; j < a.hidden; ++j) {
        dhidden[j] = dfused[j];
        demb[j] = dfused[a.hidden + j];
      }
    }
    for (int j = 0; j < a.hidden; ++j) {
      g[goal_b_ + j] += demb[j];
      g[goal_w_ + 2 * j] += demb[j] * cache.goal_in[0];
      g[goal_w_ + 2 * j + 1] += demb[j] * cache.goal_in[1];
    }
  } else {
    std::copy(dfused.begin(), dfused.end(), dhidden.begin());
  }

  const int flat = a.flat_size();
  std::vector<double> dr2(static_cast<std::size_t>(flat), 0.0);
  for (int j = 0; j < a.hidden; ++j) {
    if (cache.z[j] <= 0.0) continue;
    const double dz = cache.mask.empty() ? dhidden[j] : dhidden[j] * cache.mask[j];
    if (dz == 0.0) continue;
    g[fc_b_ + j] += dz;
    const double* wrow = p + fc_w_ + static_cast<std::size_t>(j) * flat;
    double* grow = g + fc_w_ + static_cast<std::size_t>(j) * flat;
    for (int i = 0; i < flat; ++i) {
      const double v = cache.a2[i];
      if (v > 0.0) {
        grow[i] += dz * v;
        dr2[i] += dz * wrow[i];
      }
    }
  }
  // dr2 is only non-zero where a2 > 0, so it already equals dL/da2.
  const int h1 = a.conv1_height(), w1 = a.conv1_width(), h2 = a.conv2_height(), w2 = a.conv2_width();
  const int pad = a.padding;
  std::vector<double> r1(cache.a1.size());
  for (std::size_t i = 0; i < r1.size(); ++i) r1[i] = cache.a1[i] > 0.0 ? cache.a1[i] : 0.0;
  const auto r1p = pad_tensor(r1.data(), a.conv1_channels, h1, w1, pad);
  std::vector<double> dr1p(r1p.size(), 0.0);
  conv_backward(r1p.data(), a.conv1_channels, h1 + 2 * pad, w1 + 2 * pad, p + conv2_w_, a.conv2_channels, a.kernel,
                a.stride, dr2.data(), h2, w2, g + conv2_w_, g + conv2_b_, dr1p.data());
  std::vector<double> dr1(r1.size());
  unpad_tensor(dr1p.data(), a.conv1_channels, h1, w1, pad, dr1.data());
  for (std::size_t i = 0; i < dr1.size(); ++i) {
    if (cache.a1[i] <= 0.0) dr1[i] = 0.0;
  }
  const auto xp = pad_tensor(cache.input.data(), a.in_channels, a.obs_height, a.obs_width, pad);
  conv_backward(xp.data(), a.in_channels, a.obs_height + 2 * pad, a.obs_width + 2 * pad, p + conv1_w_,
                a.conv1_channels, a.kernel, a.stride, dr1.data(), h1, w1, g + conv1_w_, g + conv1_b_, nullptr);
}

Distribution softmax(const Distribution& logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  Distribution out{};
  double sum = 0.0;
  for (int i = 0; i < kNumClasses; ++i) {
    out[i] = std::exp(logits[i] - m);
    sum += out[i];
  }
  for (auto& v : out) v /= sum;
  return out;
}

Distribution smoothed_label(int cls, double eps) {
  Distribution t{};
  t.fill(eps / kNumClasses);
  t[class_to_index(cls)] += 1.0 - eps;
  return t;
}

namespace {

/// Per-head loss CE(target, p) - lambda * H(p), and its gradient w.r.t. logits.
double head_loss(const Distribution& logits, const Distribution& probs, const Distribution& target, double lambda,
                 Distribution& dlogits, double& ce_out, double& h_out) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double lse = 0.0;
  for (double l : logits) lse += std::exp(l - m);
  lse = m + std::log(lse);
  double ce = 0.0;
  double h = 0.0;
  Distribution logp{};
  for (int i = 0; i < kNumClasses; ++i) {
    logp[i] = logits[i] - lse;
    ce -= target[i] * logp[i];
    h -= probs[i] * logp[i];
  }
  for (int i = 0; i < kNumClasses; ++i) {
    dlogits[i] = (probs[i] - target[i]) + lambda * probs[i] * (logp[i] + h);
  }
  ce_out = ce;
  h_out = h;
  return ce - lambda * h;
}

}  // namespace

LossResult compute_loss_encoded(const PolicyNetwork& net, std::span<const std::vector<double>> inputs,
                                std::span<const Example> batch, const LossConfig& config,
                                const std::vector<DropoutMask>* masks, bool want_grad) {
  if (batch.empty()) throw std::invalid_argument("compute_loss: empty batch");
  if (masks && masks->size() != batch.size()) throw std::invalid_argument("compute_loss: one mask per example");
  LossResult result;
  if (want_grad) result.grad.assign(net.param_count(), 0.0);
  ForwardCache cache;
  Distribution zero{};
  for (std::size_t n = 0; n < batch.size(); ++n) {
    const auto& ex = batch[n];
    net.forward(inputs[n], ex.goal, masks ? &(*masks)[n] : nullptr, cache);
    Distribution dly{}, dlp{};
    double ce = 0.0, h = 0.0;
    if (config.use_yaw) {
      result.total += head_loss(cache.logits_yaw, cache.heads.yaw, smoothed_label(ex.label.yaw_class, config.label_smoothing),
                                config.entropy_weight, dly, ce, h);
      result.yaw_ce += ce;
      result.yaw_entropy += h;
    }
    if (config.use_pitch) {
      result.total += head_loss(cache.logits_pitch, cache.heads.pitch,
                                smoothed_label(ex.label.pitch_class, config.label_smoothing), config.entropy_weight, dlp,
                                ce, h);
      result.pitch_ce += ce;
      result.pitch_entropy += h;
    }
    if (want_grad) net.backward(cache, config.use_yaw ? dly : zero, config.use_pitch ? dlp : zero, result.grad);
  }
  if (config.weight_decay > 0.0) {
    const auto params = net.params();
    for (const auto& b : net.blocks()) {
      if (!b.is_weight) continue;
      for (std::size_t i = b.offset; i < b.offset + b.size; ++i) {
        result.regularization += params[i] * params[i];
        if (want_grad) result.grad[i] += 2.0 * config.weight_decay * params[i];
      }
    }
    result.regularization *= config.weight_decay;
    result.total += result.regularization;
  }
  return result;
}

LossResult compute_loss(const PolicyNetwork& net, std::span<const Example> batch, const LossConfig& config,
                        const std::vector<DropoutMask>* masks, bool want_grad) {
  std::vector<std::vector<double>> inputs;
  inputs.reserve(batch.size());
  for (const auto& ex : batch) {
    if (!ex.observation) throw std::invalid_argument("compute_loss: example without observation");
    inputs.push_back(encode_observation(*ex.observation, net.arch()));
  }
  return compute_loss_encoded(net, inputs, batch, config, masks, want_grad);
}

}  // namespace nav2goal::net
