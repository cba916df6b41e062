#pragma once

#include "nav2goal/config.hpp"
#include "nav2goal/rng.hpp"
#include "nav2goal/types.hpp"

namespace nav2goal::explore {

struct ExploreConfig {
  /// Probabilities of committing to each class in C.
  Distribution p_expl = uniform_distribution();
  double t_lo = 2.0;
  double t_hi = 6.0;
  /// Entropy bandwidth B (nats).
  double bandwidth = 1.0;

  void validate() const;
  static ExploreConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "explore.");
};

struct ExploreState {
  Distribution f_expl = uniform_distribution();
  int committed_class = 0;
  double remaining = 0.0;
  int commitments = 0;
};

/// w = 1 - exp(-0.5 (H / B)^2).
double gate_weight(const Distribution& f_yaw, double bandwidth);
/// (1 - w) f + w f_expl.
Distribution mix(const Distribution& f, const Distribution& f_expl, double w);

struct ExploreOutput {
  ActionHeads heads;
  ExploreState state;
  double weight = 0.0;
  bool resampled = false;
};

/// Advances the commitment timer, resampling when it runs out, and mixes the yaw head.
ExploreOutput explore_step(const ActionHeads& policy, const ExploreState& state, const ExploreConfig& config, Rng& rng,
                           double dt);

}  // namespace nav2goal::explore
