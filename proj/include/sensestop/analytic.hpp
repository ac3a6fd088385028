#ifndef SENSESTOP_ANALYTIC_HPP
#define SENSESTOP_ANALYTIC_HPP

#include "sensestop/model.hpp"

namespace sensestop {

/// Exact per-slot performance of a stopping policy.
struct AnalyticMetrics {
  double throughput = 0.0;      // U_1, nats per slot (normalized by T)
  double avg_power = 0.0;       // S_1, average transmit energy fraction
  double success_prob = 0.0;    // p_1, probability a slot is not blocked
  double expected_delay = 0.0;  // 1/p_1 in slots; +inf when p_1 == 0
};

/// Stage integrals over the stopped channel's gain, from the threshold up:
///   rate:  int_a^inf log(1 + P(g) g) f(g) dg
///   power: int_a^inf P(g) f(g) dg
/// Closed forms (via E1) for exponential fading; adaptive quadrature for any
/// other law. A threshold of +inf yields 0 (channel always skipped).
double rate_stage_integral(const FadingLaw& law, const PowerRule& rule, double threshold);
double power_stage_integral(const FadingLaw& law, const PowerRule& rule, double threshold);

/// Quadrature route for the same integrals; the closed forms are validated
/// against these, and non-exponential laws fall back to them.
double rate_stage_integral_quadrature(const FadingLaw& law, const PowerRule& rule,
                                      double threshold, double abs_tol = 1e-10);
double power_stage_integral_quadrature(const FadingLaw& law, const PowerRule& rule,
                                       double threshold, double abs_tol = 1e-10);

/// p_1 by backward recursion: p_i = q_i + (1 - q_i) p_{i+1},
/// q_i = theta_i * F(threshold_i), p_{M+1} = 0.
double success_probability(const StoppingPolicy& policy, const ChannelEnsemble& ens);

/// 1 / p_1 in slots; returns +inf when every channel is always skipped.
double expected_delay(const StoppingPolicy& policy, const ChannelEnsemble& ens);

/// Delay of the all-zero-threshold policy, 1 / (1 - prod(1 - theta_i)):
/// the infimum of expected delay over all stopping policies.
double min_expected_delay(const ChannelEnsemble& ens);

/// S_1 = E[c_k* P_k*] by backward recursion.
double expected_power(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                      const SlotTiming& timing);

/// U_1 = E[c_k* log(1 + P_k* gain_k*)] by backward recursion.
double expected_throughput(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                           const SlotTiming& timing);

/// All four metrics in one backward pass.
AnalyticMetrics evaluate(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                         const SlotTiming& timing);

}  // namespace sensestop

#endif  // SENSESTOP_ANALYTIC_HPP
