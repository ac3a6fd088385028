#include "sensestop/solver.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>

#include "sensestop/special.hpp"

namespace sensestop {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double max_success_probability(const ChannelEnsemble& ens) {
  double blocked = 1.0;
  for (double th : ens.free_prob) blocked *= 1.0 - th;
  return 1.0 - blocked;
}

// One back-substitution pass of the gamma-finding equations at fixed duals.
// Tracks the suffix values (U, S, p) and whether every stage hit the
// threshold = lambda_p clamp; once all stages clamp, raising lambda_d further
// cannot change the policy, so p_1 has reached its plateau.
struct WfBackSub {
  StoppingPolicy policy;
  AnalyticMetrics metrics;
  bool all_clamped = true;
};

WfBackSub wf_back_substitute(const DualPoint& duals, const ChannelEnsemble& ens,
                             const SlotTiming& timing) {
  const std::size_t m = ens.count();
  WfBackSub out;
  out.policy.power_rule = waterfilling_rule(1.0 / duals.lambda_p);
  out.policy.thresholds.assign(m, 0.0);
  double u = 0.0, s = 0.0, p = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    const double c = timing.remaining_fraction(i + 1);
    const double rhs = u - duals.lambda_p * s - duals.lambda_d * (1.0 - p);
    const double rhs_pos = std::max(rhs, 0.0);
    double g;
    if (rhs_pos == 0.0) {
      g = duals.lambda_p;  // W0(-1/e) = -1
    } else {
      out.all_clamped = false;
      const double arg = -std::exp(-rhs_pos / c - 1.0);
      g = arg == 0.0 ? kInf : -duals.lambda_p / lambert_w0(arg);
      g = std::max(g, duals.lambda_p);
    }
    out.policy.thresholds[i] = g;
    const double q = ens.free_prob[i] * ens.fading.ccdf(g);
    const double keep = 1.0 - q;
    u = ens.free_prob[i] * c * rate_stage_integral(ens.fading, out.policy.power_rule, g) +
        keep * u;
    s = ens.free_prob[i] * c * power_stage_integral(ens.fading, out.policy.power_rule, g) +
        keep * s;
    p = q + keep * p;
  }
  out.metrics = AnalyticMetrics{u, s, p, p > 0.0 ? 1.0 / p : kInf};
  return out;
}

}  // namespace

BisectResult bisect(const std::function<double(double)>& f, double lo, double hi,
                    const SolverControl& ctl) {
  ctl.validate();
  detail::require(lo < hi, "bisect: need lo < hi");
  int iterations = 0;

  double f_lo = f(lo);
  ++iterations;
  if (std::fabs(f_lo) <= ctl.tol) return {lo, f_lo, iterations};
  double f_hi = f(hi);
  ++iterations;
  if (std::fabs(f_hi) <= ctl.tol) return {hi, f_hi, iterations};

  const double base = hi - lo;
  int expansions = 0;
  while (std::signbit(f_lo) == std::signbit(f_hi)) {
    if (++expansions > ctl.max_bracket_expansions)
      throw NoBracketError("bisect: no sign change after bracket expansion (|f| = " +
                           format_double(std::fabs(f_hi)) + " at " + format_double(hi) + ")");
    lo = hi;
    f_lo = f_hi;
    hi = lo + base * std::pow(ctl.bracket_growth, expansions);
    f_hi = f(hi);
    ++iterations;
    if (std::fabs(f_hi) <= ctl.tol) return {hi, f_hi, iterations};
  }

  double mid = lo, f_mid = f_lo;
  for (int it = 0; it < ctl.max_bisection_iters; ++it) {
    mid = 0.5 * (lo + hi);
    f_mid = f(mid);
    ++iterations;
    if (std::fabs(f_mid) <= ctl.tol || (hi - lo) <= ctl.tol * std::max(1.0, std::fabs(mid)))
      return {mid, f_mid, iterations};
    if (std::signbit(f_mid) == std::signbit(f_lo)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
  }
  throw NonConvergenceError("bisect: residual " + format_double(std::fabs(f_mid)) +
                            " after " + std::to_string(ctl.max_bisection_iters) +
                            " iterations");
}

StoppingPolicy thresholds_two_level(double lambda_d, const ChannelEnsemble& ens,
                                    const SlotTiming& timing) {
  detail::require(lambda_d >= 0.0, "thresholds_two_level: lambda_d must be >= 0");
  ens.validate();
  timing.validate(ens.count());
  const std::size_t m = ens.count();
  StoppingPolicy policy;
  policy.power_rule = constant_one_power();
  policy.thresholds.assign(m, 0.0);
  double u = 0.0, p = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    const double c = timing.remaining_fraction(i + 1);
    const double exponent = u - lambda_d * (1.0 - p);
    const double g = exponent > 0.0 ? std::expm1(exponent / c) : 0.0;
    policy.thresholds[i] = g;
    const double q = ens.free_prob[i] * ens.fading.ccdf(g);
    const double keep = 1.0 - q;
    u = ens.free_prob[i] * c * rate_stage_integral(ens.fading, policy.power_rule, g) +
        keep * u;
    p = q + keep * p;
  }
  return policy;
}

std::vector<double> two_level_stationarity_residuals(const StoppingPolicy& policy,
                                                     double lambda_d,
                                                     const ChannelEnsemble& ens,
                                                     const SlotTiming& timing) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  const std::size_t m = ens.count();
  std::vector<double> residuals(m);
  double u = 0.0, p = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    const double c = timing.remaining_fraction(i + 1);
    const double rhs = std::max(u - lambda_d * (1.0 - p), 0.0);
    residuals[i] = c * std::log1p(policy.thresholds[i]) - rhs;
    const double q = ens.free_prob[i] * ens.fading.ccdf(policy.thresholds[i]);
    const double keep = 1.0 - q;
    u = ens.free_prob[i] * c *
            rate_stage_integral(ens.fading, policy.power_rule, policy.thresholds[i]) +
        keep * u;
    p = q + keep * p;
  }
  return residuals;
}

SolveReport solve_two_level(const ChannelEnsemble& ens, const SlotTiming& timing,
                            double d_max, const SolverControl& ctl) {
  ens.validate();
  timing.validate(ens.count());
  ctl.validate();
  detail::require(d_max >= 1.0, "solve_two_level: d_max must be >= 1 slot");

  const double p_req = 1.0 / d_max;
  const double p_max = max_success_probability(ens);
  if (p_req - p_max > std::max(ctl.tol, 1e-12))
    throw InfeasibleError("solve_two_level: d_max = " + format_double(d_max) +
                          " lies below the minimum expected delay " +
                          format_double(1.0 / p_max));

  SolveReport report;
  report.power_status = PowerStatus::Absent;

  const StoppingPolicy unconstrained = thresholds_two_level(0.0, ens, timing);
  const AnalyticMetrics m0 = evaluate(unconstrained, ens, timing);
  if (m0.success_prob >= p_req - ctl.tol) {
    report.policy = unconstrained;
    report.metrics = m0;
    report.duals = {0.0, 0.0};
    report.delay_status = DelayStatus::Inactive;
    report.delay_slack = m0.success_prob - p_req;
    return report;
  }

  const auto residual = [&](double lambda_d) {
    return success_probability(thresholds_two_level(lambda_d, ens, timing), ens) - p_req;
  };
  const BisectResult root = bisect(residual, 0.0, 1.0, ctl);
  report.policy = thresholds_two_level(root.root, ens, timing);
  report.metrics = evaluate(report.policy, ens, timing);
  report.duals = {0.0, root.root};
  report.delay_status = DelayStatus::Active;
  report.delay_slack = report.metrics.success_prob - p_req;
  report.outer_iterations = root.iterations;
  return report;
}

SolveReport solve_two_level_unconstrained(const ChannelEnsemble& ens,
                                          const SlotTiming& timing,
                                          const SolverControl& ctl) {
  ens.validate();
  timing.validate(ens.count());
  ctl.validate();
  SolveReport report;
  report.policy = thresholds_two_level(0.0, ens, timing);
  report.metrics = evaluate(report.policy, ens, timing);
  report.duals = {0.0, 0.0};
  report.power_status = PowerStatus::Absent;
  report.delay_status = DelayStatus::Inactive;
  report.delay_slack = 0.0;
  return report;
}

double waterfilling_power(double gamma, double lambda_p) {
  detail::require_domain(gamma > 0.0, "waterfilling_power: gamma must be positive");
  detail::require_domain(lambda_p > 0.0, "waterfilling_power: lambda_p must be positive");
  return std::max(1.0 / lambda_p - 1.0 / gamma, 0.0);
}

StoppingPolicy thresholds_waterfilling(const DualPoint& duals, const ChannelEnsemble& ens,
                                       const SlotTiming& timing) {
  detail::require_domain(duals.lambda_p > 0.0,
                         "thresholds_waterfilling: lambda_p must be positive");
  detail::require(duals.lambda_d >= 0.0, "thresholds_waterfilling: lambda_d must be >= 0");
  ens.validate();
  timing.validate(ens.count());
  return wf_back_substitute(duals, ens, timing).policy;
}

std::vector<double> waterfilling_stationarity_residuals(const StoppingPolicy& policy,
                                                        const DualPoint& duals,
                                                        const ChannelEnsemble& ens,
                                                        const SlotTiming& timing) {
  policy.validate_against(ens);
  timing.validate(ens.count());
  detail::require_domain(duals.lambda_p > 0.0,
                         "waterfilling_stationarity_residuals: lambda_p must be positive");
  const std::size_t m = ens.count();
  std::vector<double> residuals(m);
  double u = 0.0, s = 0.0, p = 0.0;
  for (std::size_t i = m; i-- > 0;) {
    const double c = timing.remaining_fraction(i + 1);
    const double g = policy.thresholds[i];
    const double rhs =
        std::max(u - duals.lambda_p * s - duals.lambda_d * (1.0 - p), 0.0);
    const double lhs =
        c * (std::log(g / duals.lambda_p) -
             duals.lambda_p * std::max(1.0 / duals.lambda_p - 1.0 / g, 0.0));
    residuals[i] = lhs - rhs;
    const double q = ens.free_prob[i] * ens.fading.ccdf(g);
    const double keep = 1.0 - q;
    u = ens.free_prob[i] * c * rate_stage_integral(ens.fading, policy.power_rule, g) +
        keep * u;
    s = ens.free_prob[i] * c * power_stage_integral(ens.fading, policy.power_rule, g) +
        keep * s;
    p = q + keep * p;
  }
  return residuals;
}

SolveReport solve_optimal(const ChannelEnsemble& ens, const SlotTiming& timing,
                          const Constraints& constraints, const SolverControl& ctl) {
  ens.validate();
  timing.validate(ens.count());
  constraints.validate();
  ctl.validate();

  const double p_avg = constraints.p_avg;
  const double p_req = 1.0 / constraints.d_max;
  const double p_max = max_success_probability(ens);
  if (p_req - p_max > std::max(ctl.tol, 1e-12))
    throw InfeasibleError("solve_optimal: d_max = " + format_double(constraints.d_max) +
                          " lies below the minimum expected delay " +
                          format_double(1.0 / p_max));

  int inner_total = 0;

  // Power constraint is always active: pin S_1 = p_avg by bisecting lambda_p
  // (S_1 is decreasing in lambda_p). Residual is relative to the budget.
  const auto inner_solve = [&](double lambda_d) {
    const auto residual = [&](double lambda_p) {
      const WfBackSub ws = wf_back_substitute({lambda_p, lambda_d}, ens, timing);
      return (ws.metrics.avg_power - p_avg) / p_avg;
    };
    const BisectResult root = bisect(residual, 1e-12, 1e3 / p_avg, ctl);
    inner_total += root.iterations;
    WfBackSub ws = wf_back_substitute({root.root, lambda_d}, ens, timing);
    return std::pair<double, WfBackSub>(root.root, std::move(ws));
  };

  const auto finish = [&](double lambda_p, double lambda_d, const WfBackSub& ws,
                          DelayStatus status, int outer_iters) {
    SolveReport report;
    report.policy = ws.policy;
    report.metrics = ws.metrics;
    report.duals = {lambda_p, lambda_d};
    report.power_slack = p_avg - ws.metrics.avg_power;
    report.delay_slack = ws.metrics.success_prob - p_req;
    report.power_status = PowerStatus::Active;
    report.delay_status = status;
    report.outer_iterations = outer_iters;
    report.inner_iterations = inner_total;
    return report;
  };

  // Complementary slackness fast path: lambda_d = 0.
  const auto [lp0, ws0] = inner_solve(0.0);
  if (ws0.metrics.success_prob >= p_req - ctl.tol)
    return finish(lp0, 0.0, ws0, DelayStatus::Inactive, 0);

  // Outer bracket expansion on lambda_d, watching for the clamp plateau.
  int outer_iters = 0;
  double lo = 0.0;
  double hi = 1.0;
  bool bracketed = false;
  for (int expansions = 0; expansions <= ctl.max_bracket_expansions; ++expansions) {
    const auto [lp_hi, ws_hi] = inner_solve(hi);
    ++outer_iters;
    const double g_hi = ws_hi.metrics.success_prob - p_req;
    if (std::fabs(g_hi) <= ctl.tol)
      return finish(lp_hi, hi, ws_hi, DelayStatus::Active, outer_iters);
    if (g_hi > 0.0) {
      bracketed = true;
      break;
    }
    if (ws_hi.all_clamped) {
      // Every threshold sits at lambda_p and p_1 is still short of the
      // target: no dual point attains the bound. Drop the delay multiplier.
      return finish(lp0, 0.0, ws0, DelayStatus::Unattainable, outer_iters);
    }
    lo = hi;
    hi *= ctl.bracket_growth;
  }
  if (!bracketed)
    throw NoBracketError("solve_optimal: delay residual never bracketed (lambda_d up to " +
                         format_double(hi) + ")");

  const auto delay_residual = [&](double lambda_d) {
    const auto [lp, ws] = inner_solve(lambda_d);
    ++outer_iters;
    return ws.metrics.success_prob - p_req;
  };
  const BisectResult root = bisect(delay_residual, lo, hi, ctl);
  const auto [lp, ws] = inner_solve(root.root);
  return finish(lp, root.root, ws, DelayStatus::Active, outer_iters);
}

}  // namespace sensestop
