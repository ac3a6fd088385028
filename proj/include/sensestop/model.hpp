#ifndef SENSESTOP_MODEL_HPP
#define SENSESTOP_MODEL_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "sensestop/errors.hpp"
#include "sensestop/fading.hpp"

namespace sensestop {

/// The M channels in sensing order: per-channel free probabilities and the
/// common fading law of the link gains (i.i.d. across channels).
struct ChannelEnsemble {
  std::vector<double> free_prob;  // theta_i, probability channel i is free
  FadingLaw fading;

  std::size_t count() const { return free_prob.size(); }

  void validate() const {
    detail::require(!free_prob.empty(), "ChannelEnsemble: need at least one channel");
    for (double th : free_prob) {
      detail::require(th > 0.0 && th <= 1.0 && std::isfinite(th),
                      "ChannelEnsemble: free probabilities must lie in (0, 1]");
    }
    fading.validate();
  }
};

inline ChannelEnsemble homogeneous_ensemble(std::size_t count, double theta,
                                            const FadingLaw& fading) {
  ChannelEnsemble ens{std::vector<double>(count, theta), fading};
  ens.validate();
  return ens;
}

/// Slot timing as the sensing fraction tau/T. Sensing i channels leaves the
/// fraction c_i = 1 - i*tau/T of the slot for transmission.
struct SlotTiming {
  double tau_over_T = 0.05;

  /// c_i for 1-based channel index i.
  double remaining_fraction(std::size_t i) const {
    return 1.0 - static_cast<double>(i) * tau_over_T;
  }

  /// Requires 0 < M*tau/T < 1 so that every c_i is positive.
  void validate(std::size_t channel_count) const {
    detail::require(tau_over_T > 0.0 && std::isfinite(tau_over_T),
                    "SlotTiming: tau_over_T must be positive");
    detail::require(static_cast<double>(channel_count) * tau_over_T < 1.0,
                    "SlotTiming: M * tau_over_T must be below 1");
  }
};

/// Average-power budget and average-delay bound (slots).
struct Constraints {
  double p_avg = 1.0;
  double d_max = std::numeric_limits<double>::infinity();

  void validate() const {
    detail::require(p_avg > 0.0, "Constraints: p_avg must be positive");
    detail::require(d_max >= 1.0, "Constraints: d_max must be >= 1 slot");
  }
};

enum class PowerRuleKind : std::uint8_t {
  ConstantOne,   // transmit with unit power on the chosen channel
  WaterFilling,  // P(gain) = (level - 1/gain)^+, level = 1/lambda_p
};

struct PowerRule {
  PowerRuleKind kind = PowerRuleKind::ConstantOne;
  double level = 0.0;  // water level 1/lambda_p; meaningful for WaterFilling only

  double cutoff() const { return 1.0 / level; }  // lambda_p

  /// Transmit power as a function of the probed gain.
  double power(double gain) const {
    if (kind == PowerRuleKind::ConstantOne) return 1.0;
    return std::max(level - 1.0 / gain, 0.0);
  }
};

inline PowerRule constant_one_power() { return PowerRule{PowerRuleKind::ConstantOne, 0.0}; }

inline PowerRule waterfilling_rule(double level) {
  detail::require(level > 0.0 && std::isfinite(level),
                  "PowerRule: water-filling level must be positive and finite");
  return PowerRule{PowerRuleKind::WaterFilling, level};
}

/// A stopping rule: stop at the first free channel i whose probed gain
/// exceeds thresholds[i-1], then transmit with the active power rule.
/// A threshold of +inf marks a channel that is always skipped.
struct StoppingPolicy {
  std::vector<double> thresholds;
  PowerRule power_rule = constant_one_power();

  void validate() const {
    detail::require(!thresholds.empty(), "StoppingPolicy: empty threshold vector");
    for (double g : thresholds) {
      detail::require(g >= 0.0 && !std::isnan(g),
                      "StoppingPolicy: thresholds must be >= 0 (or +inf)");
    }
    if (power_rule.kind == PowerRuleKind::WaterFilling) {
      detail::require(power_rule.level > 0.0 && std::isfinite(power_rule.level),
                      "StoppingPolicy: water-filling level must be positive");
    }
  }

  void validate_against(const ChannelEnsemble& ens) const {
    validate();
    detail::require(thresholds.size() == ens.count(),
                    "StoppingPolicy: threshold count differs from channel count");
  }
};

}  // namespace sensestop

#endif  // SENSESTOP_MODEL_HPP
