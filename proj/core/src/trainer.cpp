#include "nav2goal/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace nav2goal::net {

void TrainConfig::validate() const {
  if (!(loss.label_smoothing >= 0.0 && loss.label_smoothing < 1.0)) {
    throw std::invalid_argument("train: label_smoothing must lie in [0, 1)");
  }
  if (loss.entropy_weight < 0.0 || loss.weight_decay < 0.0) {
    throw std::invalid_argument("train: entropy_weight and weight_decay must be non-negative");
  }
  if (!(validation_split > 0.0 && validation_split < 1.0)) {
    throw std::invalid_argument("train: validation_split must lie in (0, 1)");
  }
  if (learning_rate < 0.0) throw std::invalid_argument("train: learning_rate must be non-negative");
  if (batch_size <= 0 || epochs < 0) throw std::invalid_argument("train: batch_size > 0 and epochs >= 0 required");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw std::invalid_argument("train: dropout must lie in [0, 1)");
  if (!(final_lr_fraction >= 0.0 && final_lr_fraction <= 1.0)) {
    throw std::invalid_argument("train: final_lr_fraction must lie in [0, 1]");
  }
}

TrainConfig TrainConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  TrainConfig c;
  c.loss.label_smoothing = cfg.get_double(prefix + "label_smoothing", c.loss.label_smoothing);
  c.loss.entropy_weight = cfg.get_double(prefix + "entropy_weight", c.loss.entropy_weight);
  c.loss.weight_decay = cfg.get_double(prefix + "weight_decay", c.loss.weight_decay);
  c.learning_rate = cfg.get_double(prefix + "learning_rate", c.learning_rate);
  c.batch_size = cfg.get_int(prefix + "batch_size", c.batch_size);
  c.dropout = cfg.get_double(prefix + "dropout", c.dropout);
  c.epochs = cfg.get_int(prefix + "epochs", c.epochs);
  c.final_lr_fraction = cfg.get_double(prefix + "final_lr_fraction", c.final_lr_fraction);
  c.validation_split = cfg.get_double(prefix + "validation_split", c.validation_split);
  c.validate();
  return c;
}

Accuracy evaluate_accuracy(const PolicyNetwork& net, std::span<const Example> examples) {
  Accuracy acc;
  if (examples.empty()) return acc;
  ForwardCache cache;
  std::size_t yaw_ok = 0, pitch_ok = 0;
  for (const auto& ex : examples) {
    net.forward(encode_observation(*ex.observation, net.arch()), ex.goal, nullptr, cache);
    if (argmax_class(cache.heads.yaw) == ex.label.yaw_class) ++yaw_ok;
    if (argmax_class(cache.heads.pitch) == ex.label.pitch_class) ++pitch_ok;
  }
  acc.yaw = static_cast<double>(yaw_ok) / examples.size();
  acc.pitch = static_cast<double>(pitch_ok) / examples.size();
  return acc;
}

FrameBatchSource::FrameBatchSource(std::vector<Example> examples) : examples_(std::move(examples)) {
  order_.resize(examples_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

void FrameBatchSource::start_epoch(Rng& rng) {
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  for (std::size_t i = order_.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i - 1)));
    std::swap(order_[i - 1], order_[j]);
  }
  cursor_ = 0;
}

std::vector<Example> FrameBatchSource::next_batch(std::size_t n, Rng&) {
  std::vector<Example> out;
  while (out.size() < n && cursor_ < order_.size()) out.push_back(examples_[order_[cursor_++]]);
  return out;
}

Split split_by_trajectory(std::size_t count, double validation_fraction, Rng& rng) {
  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t i = count; i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(i - 1)));
    std::swap(order[i - 1], order[j]);
  }
  auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(count)));
  if (count >= 2) n_val = std::clamp<std::size_t>(n_val, 1, count - 1);
  Split s;
  s.validation.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(std::min(n_val, count)));
  s.train.assign(order.begin() + static_cast<std::ptrdiff_t>(std::min(n_val, count)), order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

std::vector<Example> frame_examples(const std::vector<hindsight::Trajectory>& trajectories,
                                    const std::vector<std::size_t>& which) {
  std::vector<Example> out;
  for (auto i : which) {
    for (const auto& rec : trajectories.at(i).records) out.push_back({&rec.observation, std::nullopt, rec.action});
  }
  return out;
}

Adam::Adam(std::size_t size, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps), m_(size, 0.0), v_(size, 0.0) {}

void Adam::step(std::span<double> params, std::span<const double> grad) {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
  }
}

TrainReport train(PolicyNetwork& net, BatchSource& source, std::span<const Example> validation,
                  const TrainConfig& config, Rng& rng, const EpochCallback& on_epoch) {
  config.validate();
  TrainReport report;
  report.train_examples = source.epoch_size();
  report.val_examples = validation.size();
  const auto init = evaluate_accuracy(net, validation);
  report.initial_val_yaw_acc = init.yaw;
  report.initial_val_pitch_acc = init.pitch;
  if (source.epoch_size() == 0) throw TrainingError("train: no training examples");

  std::vector<const ParamBlock*> frozen;
  for (const auto& name : config.frozen) frozen.push_back(&net.block(name));

  Adam adam(net.param_count(), config.learning_rate, config.adam_beta1, config.adam_beta2, config.adam_epsilon);
  const auto bs = static_cast<std::size_t>(config.batch_size);
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.epochs > 1) {
      const double progress = static_cast<double>(epoch - 1) / static_cast<double>(config.epochs - 1);
      const double scale = config.final_lr_fraction + (1.0 - config.final_lr_fraction) * 0.5 * (1.0 + std::cos(kPi * progress));
      adam.set_learning_rate(config.learning_rate * scale);
    }
    source.start_epoch(rng);
    double loss_sum = 0.0;
    std::size_t seen = 0;
    int batch_index = 0;
    for (auto batch = source.next_batch(bs, rng); !batch.empty(); batch = source.next_batch(bs, rng), ++batch_index) {
      std::vector<DropoutMask> masks;
      masks.reserve(batch.size());
      for (std::size_t i = 0; i < batch.size(); ++i) {
        masks.push_back(sample_dropout_mask(net.arch().hidden, config.dropout, rng));
      }
      auto result = compute_loss(net, batch, config.loss, &masks, true);
      if (!std::isfinite(result.total)) {
        std::ostringstream msg;
        msg << "non-finite loss at epoch " << epoch << " batch " << batch_index << ": total=" << result.total
            << " yaw_ce=" << result.yaw_ce << " pitch_ce=" << result.pitch_ce
            << " reg=" << result.regularization;
        throw TrainingError(msg.str());
      }
      for (const auto* b : frozen) std::fill_n(result.grad.begin() + static_cast<std::ptrdiff_t>(b->offset), b->size, 0.0);
      adam.step(net.params(), result.grad);
      loss_sum += result.total;
      seen += batch.size();
    }
    const auto acc = evaluate_accuracy(net, validation);
    EpochStats stats{epoch, seen ? loss_sum / static_cast<double>(seen) : 0.0, acc.yaw, acc.pitch};
    report.epochs.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  return report;
}

void quantize_to_float(PolicyNetwork& net) {
  for (auto& p : net.params()) p = static_cast<double>(static_cast<float>(p));
}

}  // namespace nav2goal::net
