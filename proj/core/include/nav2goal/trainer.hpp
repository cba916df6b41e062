#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include "nav2goal/config.hpp"
#include "nav2goal/network.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/trajectory.hpp"

namespace nav2goal::net {

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TrainConfig {
  LossConfig loss;
  double learning_rate = 1e-3;
  int batch_size = 64;
  double dropout = 0.1;
  int epochs = 20;
  /// Cosine decay over the run down to learning_rate * final_lr_fraction; 1 keeps it constant.
  double final_lr_fraction = 0.1;
  double validation_split = 0.2;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Parameter blocks held fixed during training.
  std::vector<std::string> frozen;

  void validate() const;
  static TrainConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "train.");
};

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // mean per example
  double val_yaw_acc = 0.0;
  double val_pitch_acc = 0.0;
};

struct TrainReport {
  double initial_val_yaw_acc = 0.0;
  double initial_val_pitch_acc = 0.0;
  std::size_t train_examples = 0;
  std::size_t val_examples = 0;
  std::vector<EpochStats> epochs;
};

struct Accuracy {
  double yaw = 0.0;
  double pitch = 0.0;
};

/// Argmax agreement with the unsmoothed labels, dropout off.
Accuracy evaluate_accuracy(const PolicyNetwork& net, std::span<const Example> examples);

/// Supplies the minibatches of one epoch.
class BatchSource {
 public:
  virtual ~BatchSource() = default;
  virtual std::size_t epoch_size() const = 0;
  virtual void start_epoch(Rng& rng) = 0;
  /// Next minibatch of at most n examples; empty once the epoch is exhausted.
  virtual std::vector<Example> next_batch(std::size_t n, Rng& rng) = 0;
};

/// Fixed examples, reshuffled every epoch.
class FrameBatchSource : public BatchSource {
 public:
  explicit FrameBatchSource(std::vector<Example> examples);
  std::size_t epoch_size() const override { return examples_.size(); }
  void start_epoch(Rng& rng) override;
  std::vector<Example> next_batch(std::size_t n, Rng& rng) override;

 private:
  std::vector<Example> examples_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

/// Train/validation trajectory indices; whole trajectories go to one side.
struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};
Split split_by_trajectory(std::size_t count, double validation_fraction, Rng& rng);

/// Goal-free examples for every record of the selected trajectories.
std::vector<Example> frame_examples(const std::vector<hindsight::Trajectory>& trajectories,
                                    const std::vector<std::size_t>& which);

class Adam {
 public:
  Adam(std::size_t size, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);
  void step(std::span<double> params, std::span<const double> grad);
  long steps() const { return t_; }
  void set_learning_rate(double lr) { lr_ = lr; }

 private:
  double lr_, beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<double> m_, v_;
};

using EpochCallback = std::function<void(const EpochStats&)>;

/// Minibatch Adam on the batch-summed loss. Throws TrainingError on a non-finite loss.
TrainReport train(PolicyNetwork& net, BatchSource& source, std::span<const Example> validation,
                  const TrainConfig& config, Rng& rng, const EpochCallback& on_epoch = {});

/// Rounds every parameter to float precision, matching what a checkpoint stores.
void quantize_to_float(PolicyNetwork& net);

}  // namespace nav2goal::net
