#include "sensestop/analytic.hpp"

#include <cmath>
#include <limits>

#include "sensestop/quadrature.hpp"
#include "sensestop/special.hpp"

namespace sensestop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// int_a^inf log(1+g) f(g) dg = e^{-a/G} [log(1+a) + e^{(1+a)/G} E1((1+a)/G)]
double exp_rate_constant(double mean_gain, double a) {
  return std::exp(-a / mean_gain) *
         (std::log1p(a) + exp_integral_e1_scaled((1.0 + a) / mean_gain));
}

// With P(g) = (L - 1/g)^+ the integrand is log(gL) above the cutoff 1/L:
// int_b^inf log(gL) f(g) dg = e^{-b/G} [log(bL) + e^{b/G} E1(b/G)], b = max(a, 1/L).
double exp_rate_waterfilling(double mean_gain, double level, double a) {
  const double b = std::max(a, 1.0 / level);
  return std::exp(-b / mean_gain) *
         (std::log(b * level) + exp_integral_e1_scaled(b / mean_gain));
}

// int_b^inf (L - 1/g) f(g) dg = e^{-b/G} [L - e^{b/G} E1(b/G)/G], b = max(a, 1/L).
double exp_power_waterfilling(double mean_gain, double level, double a) {
  const double b = std::max(a, 1.0 / level);
  return std::exp(-b / mean_gain) *
         (level - exp_integral_e1_scaled(b / mean_gain) / mean_gain);
}

}  // namespace

double rate_stage_integral(const FadingLaw& law, const PowerRule& rule, double threshold) {
  if (std::isinf(threshold)) return 0.0;
  if (law.kind == FadingKind::Exponential) {
    if (rule.kind == PowerRuleKind::ConstantOne)
      return exp_rate_constant(law.mean_gain, threshold);
    return exp_rate_waterfilling(law.mean_gain, rule.level, threshold);
  }
  return rate_stage_integral_quadrature(law, rule, threshold);
}

double power_stage_integral(const FadingLaw& law, const PowerRule& rule, double threshold) {
  if (std::isinf(threshold)) return 0.0;
  if (law.kind == FadingKind::Exponential) {
    if (rule.kind == PowerRuleKind::ConstantOne) return law.ccdf(threshold);
    return exp_power_waterfilling(law.mean_gain, rule.level, threshold);
  }
  return power_stage_integral_quadrature(law, rule, threshold);
}

double rate_stage_integral_quadrature(const FadingLaw& law, const PowerRule& rule,
                                      double threshold, double abs_tol) {
  if (std::isinf(threshold)) return 0.0;
  double lower = threshold;
  if (rule.kind == PowerRuleKind::WaterFilling) lower = std::max(lower, rule.cutoff());
  const auto integrand = [&](double g) {
    return std::log1p(rule.power(g) * g) * law.pdf(g);
  };
  return integrate_exponential_tail(integrand, lower, law.mean_gain, abs_tol);
}

double power_stage_integral_quadrature(const FadingLaw& law, const PowerRule& rule,
                                       double threshold, double abs_tol) {
  if (std::isinf(threshold)) return 0.0;
  double lower = threshold;
  if (rule.kind == PowerRuleKind::WaterFilling) lower = std::max(lower, rule.cutoff());
  const auto integrand = [&](double g) { return rule.power(g) * law.pdf(g); };
  return integrate_exponential_tail(integrand, lower, law.mean_gain, abs_tol);
}

double success_probability(const StoppingPolicy& policy, const ChannelEnsemble& ens) {
  policy.validate_against(ens);
  double p = 0.0;
  for (std::size_t i = ens.count(); i-- > 0;) {
    const double q = ens.free_prob[i] * ens.fading.ccdf(policy.thresholds[i]);
    p = q + (1.0 - q) * p;
  }
  return p;
}

double expected_delay(const StoppingPolicy& policy, const ChannelEnsemble& ens) {
  const double p = success_probability(policy, ens);
  return p > 0.0 ? 1.0 / p : kInf;
}

double min_expected_delay(const ChannelEnsemble& ens) {
  ens.validate();
  double blocked = 1.0;
  for (double th : ens.free_prob) blocked *= 1.0 - th;
  const double p_max = 1.0 - blocked;
  if (p_max <= 0.0)
    throw InfeasibleError("min_expected_delay: success probability is zero for all policies");
  return 1.0 / p_max;
}

double expected_power(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                      const SlotTiming& timing) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  double s = 0.0;
  for (std::size_t i = ens.count(); i-- > 0;) {
    const double theta = ens.free_prob[i];
    const double c = timing.remaining_fraction(i + 1);
    const double stage = theta * c * power_stage_integral(ens.fading, policy.power_rule,
                                                          policy.thresholds[i]);
    const double q = theta * ens.fading.ccdf(policy.thresholds[i]);
    s = stage + (1.0 - q) * s;
  }
  return s;
}

double expected_throughput(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                           const SlotTiming& timing) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  double u = 0.0;
  for (std::size_t i = ens.count(); i-- > 0;) {
    const double theta = ens.free_prob[i];
    const double c = timing.remaining_fraction(i + 1);
    const double stage = theta * c * rate_stage_integral(ens.fading, policy.power_rule,
                                                         policy.thresholds[i]);
    const double q = theta * ens.fading.ccdf(policy.thresholds[i]);
    u = stage + (1.0 - q) * u;
  }
  return u;
}

AnalyticMetrics evaluate(const StoppingPolicy& policy, const ChannelEnsemble& ens,
                         const SlotTiming& timing) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  AnalyticMetrics m;
  for (std::size_t i = ens.count(); i-- > 0;) {
    const double theta = ens.free_prob[i];
    const double c = timing.remaining_fraction(i + 1);
    const double a = policy.thresholds[i];
    const double q = theta * ens.fading.ccdf(a);
    const double keep = 1.0 - q;
    m.throughput = theta * c * rate_stage_integral(ens.fading, policy.power_rule, a) +
                   keep * m.throughput;
    m.avg_power = theta * c * power_stage_integral(ens.fading, policy.power_rule, a) +
                  keep * m.avg_power;
    m.success_prob = q + keep * m.success_prob;
  }
  m.expected_delay = m.success_prob > 0.0 ? 1.0 / m.success_prob : kInf;
  return m;
}

}  // namespace sensestop
