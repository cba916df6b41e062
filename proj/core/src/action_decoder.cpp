#include "nav2goal/action_decoder.hpp"

#include <stdexcept>

namespace nav2goal::net {

DecoderConfig DecoderConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  DecoderConfig c;
  c.rate_per_class = deg2rad(cfg.get_double(prefix + "rate_per_class_deg", rad2deg(c.rate_per_class)));
  c.beta = cfg.get_double(prefix + "beta", c.beta);
  c.use_argmax = cfg.get_bool(prefix + "argmax", c.use_argmax);
  return c;
}

ActionDecoder::ActionDecoder(DecoderConfig config) : config_(config) {
  if (!(config_.beta >= 0.0 && config_.beta < 1.0)) throw std::invalid_argument("decoder: beta must lie in [0, 1)");
}

RateCommand ActionDecoder::raw(const ActionHeads& heads) const {
  auto value = [&](const Distribution& d) {
    return config_.use_argmax ? static_cast<double>(argmax_class(d)) : expected_class(d);
  };
  return {value(heads.yaw) * config_.rate_per_class, value(heads.pitch) * config_.rate_per_class};
}

RateCommand ActionDecoder::decode(const ActionHeads& heads) {
  const auto r = raw(heads);
  state_.yaw_rate = config_.beta * state_.yaw_rate + (1.0 - config_.beta) * r.yaw_rate;
  state_.pitch_rate = config_.beta * state_.pitch_rate + (1.0 - config_.beta) * r.pitch_rate;
  return state_;
}

}  // namespace nav2goal::net
