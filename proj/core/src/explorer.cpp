#include "nav2goal/explorer.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace nav2goal::explore {

void ExploreConfig::validate() const {
  double sum = 0.0;
  for (double p : p_expl) {
    if (!(p >= 0.0)) throw std::invalid_argument("explore: p_expl entries must be non-negative");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("explore: p_expl must sum to 1");
  if (!(t_lo > 0.0 && t_lo <= t_hi)) throw std::invalid_argument("explore: need 0 < t_lo <= t_hi");
  if (!(bandwidth > 0.0)) throw std::invalid_argument("explore: bandwidth must be positive");
}

ExploreConfig ExploreConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
  ExploreConfig c;
  const auto p = cfg.get_doubles(prefix + "p_expl", {c.p_expl.begin(), c.p_expl.end()});
  if (p.size() != kNumClasses) throw ConfigError(prefix + "p_expl needs 7 values");
  std::copy(p.begin(), p.end(), c.p_expl.begin());
  c.t_lo = cfg.get_double(prefix + "t_lo", c.t_lo);
  c.t_hi = cfg.get_double(prefix + "t_hi", c.t_hi);
  c.bandwidth = cfg.get_double(prefix + "bandwidth", c.bandwidth);
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return c;
}

double gate_weight(const Distribution& f_yaw, double bandwidth) {
  const double r = entropy(f_yaw) / bandwidth;
  return -std::expm1(-0.5 * r * r);
}

Distribution mix(const Distribution& f, const Distribution& f_expl, double w) {
  Distribution out{};
  for (int i = 0; i < kNumClasses; ++i) out[i] = (1.0 - w) * f[i] + w * f_expl[i];
  return out;
}

ExploreOutput explore_step(const ActionHeads& policy, const ExploreState& state, const ExploreConfig& config, Rng& rng,
                           double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("explore_step: dt must be positive");
  ExploreOutput out;
  out.state = state;
  out.state.remaining -= dt;
  if (out.state.remaining <= 0.0) {
    std::discrete_distribution<int> pick(config.p_expl.begin(), config.p_expl.end());
    out.state.committed_class = index_to_class(pick(rng));
    out.state.f_expl = one_hot(out.state.committed_class);
    out.state.remaining = uniform(rng, config.t_lo, config.t_hi);
    ++out.state.commitments;
    out.resampled = true;
  }
  out.weight = gate_weight(policy.yaw, config.bandwidth);
  out.heads.yaw = mix(policy.yaw, out.state.f_expl, out.weight);
  out.heads.pitch = policy.pitch;
  return out;
}

}  // namespace nav2goal::explore
