#pragma once

#include "nav2goal/config.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::net {

struct DecoderConfig {
  /// Rate commanded per unit of class value (rad/s).
  double rate_per_class = deg2rad(10.0);
  /// EMA weight on the previous output.
  double beta = 0.6;
  /// Decode the most likely class instead of the expected class.
  bool use_argmax = false;

  static DecoderConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "decoder.");
};

/// Rate commands, x = yaw rate, y = pitch rate.
struct RateCommand {
  double yaw_rate = 0.0;
  double pitch_rate = 0.0;
};

/// Converts the two heads into smoothed actuator rate commands.
class ActionDecoder {
 public:
  explicit ActionDecoder(DecoderConfig config = {});

  RateCommand raw(const ActionHeads& heads) const;
  RateCommand decode(const ActionHeads& heads);
  void reset(RateCommand state = {}) { state_ = state; }
  RateCommand state() const { return state_; }
  const DecoderConfig& config() const { return config_; }

 private:
  DecoderConfig config_;
  RateCommand state_{};
};

}  // namespace nav2goal::net
