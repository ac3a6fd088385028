#ifndef SENSESTOP_SOLVER_HPP
#define SENSESTOP_SOLVER_HPP

#include <functional>
#include <vector>

#include "sensestop/analytic.hpp"
#include "sensestop/model.hpp"

namespace sensestop {

/// Lagrange multipliers of the power and delay constraints.
struct DualPoint {
  double lambda_p = 0.0;
  double lambda_d = 0.0;
};

enum class DelayStatus {
  Active,        // lambda_d > 0, p_1 pinned to 1/d_max
  Inactive,      // lambda_d = 0, bound satisfied with slack
  Unattainable,  // bound violated at every dual point; lambda_d = 0 returned
};

enum class PowerStatus {
  Active,    // lambda_p > 0, S_1 pinned to p_avg
  Inactive,  // never produced: throughput is strictly increasing in power
  Absent,    // two-level problems carry no power constraint
};

struct SolverControl {
  double tol = 1e-9;              // residual tolerance on the slackness equations
  int max_bisection_iters = 200;  // per bisection
  double bracket_growth = 4.0;    // geometric bracket expansion factor
  int max_bracket_expansions = 60;

  void validate() const {
    detail::require(tol > 0.0, "SolverControl: tol must be positive");
    detail::require(max_bisection_iters >= 1, "SolverControl: max_bisection_iters >= 1");
    detail::require(bracket_growth > 1.0, "SolverControl: bracket_growth must exceed 1");
    detail::require(max_bracket_expansions >= 1, "SolverControl: expansions >= 1");
  }
};

/// Solution bundle: policy, duals, metrics, and the slackness residuals of the
/// constraints (positive slack = satisfied with margin).
struct SolveReport {
  StoppingPolicy policy;
  DualPoint duals;
  AnalyticMetrics metrics;
  double power_slack = 0.0;  // p_avg - S_1 (0 when no power constraint)
  double delay_slack = 0.0;  // p_1 - 1/d_max
  int outer_iterations = 0;
  int inner_iterations = 0;
  DelayStatus delay_status = DelayStatus::Inactive;
  PowerStatus power_status = PowerStatus::Absent;
};

struct BisectResult {
  double root = 0.0;
  double f_at_root = 0.0;
  int iterations = 0;
};

/// Root of a monotone residual f on [lo, hi]. If f(lo) and f(hi) share a
/// sign, hi is grown geometrically (bracket_growth) until a sign change or a
/// |f| <= tol probe appears; failing that, NoBracketError. Converges when
/// |f| <= tol or the interval width falls below tol * max(1, |root|);
/// exhausting max_bisection_iters raises NonConvergenceError.
BisectResult bisect(const std::function<double(double)>& f, double lo, double hi,
                    const SolverControl& ctl = SolverControl{});

/// Two-level (unit power) thresholds for a given delay multiplier:
/// back-substitution from channel M down to 1 of
///   threshold_i = [exp((U_{i+1} - lambda_d (1 - p_{i+1})) / c_i) - 1]^+.
StoppingPolicy thresholds_two_level(double lambda_d, const ChannelEnsemble& ens,
                                    const SlotTiming& timing);

/// First-order residuals c_i log(1 + threshold_i) - [U_{i+1} - lambda_d (1 - p_{i+1})]^+
/// (zero at a stationary two-level policy, including clamped stages).
std::vector<double> two_level_stationarity_residuals(const StoppingPolicy& policy,
                                                     double lambda_d,
                                                     const ChannelEnsemble& ens,
                                                     const SlotTiming& timing);

/// Maximize throughput under unit power subject to E[D] <= d_max: bisects
/// lambda_d until p_1 = 1/d_max (success probability is nondecreasing in
/// lambda_d), unless the bound already holds at lambda_d = 0. Throws
/// InfeasibleError when 1/d_max exceeds the all-zero-threshold success
/// probability.
SolveReport solve_two_level(const ChannelEnsemble& ens, const SlotTiming& timing,
                            double d_max, const SolverControl& ctl = SolverControl{});

/// The delay-unconstrained baseline: thresholds_two_level(0).
SolveReport solve_two_level_unconstrained(const ChannelEnsemble& ens,
                                          const SlotTiming& timing,
                                          const SolverControl& ctl = SolverControl{});

/// Water-filling power for a probed gain: (1/lambda_p - 1/gamma)^+.
double waterfilling_power(double gamma, double lambda_p);

/// Thresholds of the optimal-power problem at fixed duals, by back-substituting
/// the gamma-finding equations; each threshold is
///   -lambda_p / W0(-exp(-[U* - lambda_p S* - lambda_d (1 - p*)]^+ / c_i - 1)),
/// which always lands in [lambda_p, inf).
StoppingPolicy thresholds_waterfilling(const DualPoint& duals, const ChannelEnsemble& ens,
                                       const SlotTiming& timing);

/// Residuals of the gamma-finding equations at the policy's thresholds:
/// c_i (log(g/lambda_p) - lambda_p (1/lambda_p - 1/g)^+) - [RHS_i]^+.
std::vector<double> waterfilling_stationarity_residuals(const StoppingPolicy& policy,
                                                        const DualPoint& duals,
                                                        const ChannelEnsemble& ens,
                                                        const SlotTiming& timing);

/// Full problem: maximize throughput subject to S_1 <= p_avg and
/// E[D] <= d_max. Nested bisection: the outer loop drives p_1 to 1/d_max via
/// lambda_d, the inner loop drives S_1 to p_avg via lambda_p (the power
/// constraint is always active). When the delay target exceeds what the
/// water-filling threshold family can reach (every stage clamped at
/// threshold = lambda_p and p_1 still short), the delay multiplier is dropped
/// to zero and the report carries DelayStatus::Unattainable with a negative
/// delay_slack.
SolveReport solve_optimal(const ChannelEnsemble& ens, const SlotTiming& timing,
                          const Constraints& constraints,
                          const SolverControl& ctl = SolverControl{});

}  // namespace sensestop

#endif  // SENSESTOP_SOLVER_HPP
