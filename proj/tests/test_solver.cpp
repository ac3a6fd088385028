#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "sensestop/quadrature.hpp"
#include "sensestop/solver.hpp"

using namespace sensestop;

namespace {

const SlotTiming kTiming{0.05};

ChannelEnsemble canonical_ensemble(double mean_gain) {
  return homogeneous_ensemble(10, 0.1, exponential_fading(mean_gain));
}

// Left side of the gamma-finding equation.
double Y(double gamma, double lambda_p, double c) {
  return c * (std::log(gamma / lambda_p) -
              lambda_p * std::max(1.0 / lambda_p - 1.0 / gamma, 0.0));
}

}  // namespace

TEST_CASE("bisect on simple monotone functions") {
  const SolverControl ctl;
  CHECK(bisect([](double x) { return x - 2.0; }, 0.0, 10.0, ctl).root ==
        doctest::Approx(2.0).epsilon(1e-9));
  // |f| <= 1e-9 at the accepted root puts the root within ~2e-9 of ln 2
  CHECK(bisect([](double x) { return std::exp(-x) - 0.5; }, 0.0, 10.0, ctl).root ==
        doctest::Approx(std::log(2.0)).epsilon(1e-8));
}

TEST_CASE("bisect expands an undersized bracket") {
  const SolverControl ctl;
  CHECK(bisect([](double x) { return x - 100.0; }, 0.0, 1.0, ctl).root ==
        doctest::Approx(100.0).epsilon(1e-7));
}

TEST_CASE("bisect reports a missing bracket") {
  SolverControl ctl;
  ctl.max_bracket_expansions = 10;
  CHECK_THROWS_AS(bisect([](double x) { return x + 10.0; }, 0.0, 1.0, ctl), NoBracketError);
}

TEST_CASE("two-level thresholds: last channel is never skipped") {
  const auto ens = canonical_ensemble(1.0);
  for (double lambda_d : {0.0, 0.7, 5.0}) {
    const auto policy = thresholds_two_level(lambda_d, ens, kTiming);
    CHECK(policy.thresholds.back() == 0.0);
  }
  const auto single = homogeneous_ensemble(1, 1.0, exponential_fading(1.0));
  CHECK(thresholds_two_level(0.0, single, kTiming).thresholds[0] == 0.0);
  CHECK_THROWS_AS(thresholds_two_level(-0.1, ens, kTiming), std::invalid_argument);
}

TEST_CASE("two-level thresholds match a stagewise grid search at lambda_d = 0") {
  // Back-substitution separability: channel i's threshold maximizes the stage
  // value given the already-fixed suffix, so a per-stage grid argmax is an
  // independent oracle.
  const auto ens = homogeneous_ensemble(3, 0.1, exponential_fading(1.0));
  const auto policy = thresholds_two_level(0.0, ens, kTiming);

  double u_suffix = 0.0;
  std::vector<double> grid_thresholds(3);
  for (std::size_t i = 3; i-- > 0;) {
    const double c = kTiming.remaining_fraction(i + 1);
    double best_u = -1.0, best_g = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double g = 0.01 * k;
      const double q = ens.free_prob[i] * ens.fading.ccdf(g);
      const double u = ens.free_prob[i] * c *
                           rate_stage_integral(ens.fading, constant_one_power(), g) +
                       (1.0 - q) * u_suffix;
      if (u > best_u) {
        best_u = u;
        best_g = g;
      }
    }
    grid_thresholds[i] = best_g;
    u_suffix = best_u;
  }
  const auto grid_policy = StoppingPolicy{grid_thresholds, constant_one_power()};
  CHECK(expected_throughput(policy, ens, kTiming) >=
        expected_throughput(grid_policy, ens, kTiming) - 1e-12);
  for (std::size_t i = 0; i < 3; ++i)
    CHECK(std::fabs(policy.thresholds[i] - grid_thresholds[i]) <= 0.01);
  CHECK(expected_throughput(policy, ens, kTiming) ==
        doctest::Approx(expected_throughput(grid_policy, ens, kTiming)).epsilon(1e-4));
}

TEST_CASE("solve_two_level: slack bound returns the unconstrained policy") {
  const auto ens = canonical_ensemble(1.0);
  const auto constrained = solve_two_level(ens, kTiming, 1e6);
  const auto unconstrained = solve_two_level_unconstrained(ens, kTiming);
  CHECK(constrained.delay_status == DelayStatus::Inactive);
  CHECK(constrained.duals.lambda_d == 0.0);
  CHECK(constrained.power_status == PowerStatus::Absent);
  for (std::size_t i = 0; i < 10; ++i)
    CHECK(constrained.policy.thresholds[i] == unconstrained.policy.thresholds[i]);
}

TEST_CASE("solve_two_level: bound at the minimum delay forces zero thresholds") {
  const auto ens = canonical_ensemble(1.0);
  const double d_min = min_expected_delay(ens);
  const auto report = solve_two_level(ens, kTiming, d_min);
  for (double g : report.policy.thresholds) CHECK(g <= 1e-6);
  CHECK(report.metrics.success_prob ==
        doctest::Approx(1.0 / d_min).epsilon(1e-9));
}

TEST_CASE("solve_two_level: canonical instance at d_max = 1.54") {
  const auto ens = canonical_ensemble(1.0);
  const auto constrained = solve_two_level(ens, kTiming, 1.54);
  const auto unconstrained = solve_two_level_unconstrained(ens, kTiming);
  CHECK(constrained.delay_status == DelayStatus::Active);
  CHECK(constrained.metrics.expected_delay == doctest::Approx(1.54).epsilon(1e-9));
  const double gap = (unconstrained.metrics.throughput - constrained.metrics.throughput) /
                     unconstrained.metrics.throughput;
  CHECK(gap > 0.0);
  CHECK(gap < 0.04);
}

TEST_CASE("solve_two_level: infeasible bound") {
  const auto ens = canonical_ensemble(1.0);
  CHECK_THROWS_AS(solve_two_level(ens, kTiming, 1.2), InfeasibleError);
}

TEST_CASE("generic bisect reproduces solve_two_level's multiplier") {
  const auto ens = canonical_ensemble(1.0);
  const auto report = solve_two_level(ens, kTiming, 1.54);
  const auto f = [&](double lambda_d) {
    return success_probability(thresholds_two_level(lambda_d, ens, kTiming), ens) -
           1.0 / 1.54;
  };
  const BisectResult root = bisect(f, 0.0, 1.0);
  CHECK(root.root == doctest::Approx(report.duals.lambda_d).epsilon(1e-9));
}

TEST_CASE("two-level KKT plug-back") {
  const auto ens = canonical_ensemble(1.0);
  const auto report = solve_two_level(ens, kTiming, 1.54);
  const auto residuals = two_level_stationarity_residuals(report.policy,
                                                          report.duals.lambda_d, ens,
                                                          kTiming);
  for (double r : residuals) CHECK(std::fabs(r) <= 1e-8);
  CHECK(std::fabs(report.duals.lambda_d * report.delay_slack) <= 1e-8);
}

TEST_CASE("waterfilling_power") {
  CHECK(waterfilling_power(0.5, 0.5) == 0.0);
  CHECK(waterfilling_power(2.0, 0.5) == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(waterfilling_power(1e9, 0.5) == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_THROWS_AS(waterfilling_power(0.0, 0.5), std::domain_error);
  CHECK_THROWS_AS(waterfilling_power(1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(waterfilling_power(-1.0, 0.5), std::domain_error);
}

TEST_CASE("gamma-finding closed form: last channel sits at the cutoff") {
  const auto ens = canonical_ensemble(1.0);
  for (double lambda_p : {0.2, 0.7, 2.0}) {
    const auto policy = thresholds_waterfilling({lambda_p, 0.0}, ens, kTiming);
    CHECK(policy.thresholds.back() == doctest::Approx(lambda_p).epsilon(1e-12));
    CHECK(policy.power_rule.kind == PowerRuleKind::WaterFilling);
    CHECK(policy.power_rule.level == doctest::Approx(1.0 / lambda_p).epsilon(1e-14));
  }
  CHECK_THROWS_AS(thresholds_waterfilling({0.0, 0.0}, canonical_ensemble(1.0), kTiming),
                  std::domain_error);
}

TEST_CASE("gamma-finding closed form satisfies the defining equations") {
  for (const DualPoint duals : {DualPoint{0.5, 0.0}, DualPoint{0.4, 0.3},
                                DualPoint{1.1, 2.0}}) {
    const auto ens = canonical_ensemble(1.3);
    const auto policy = thresholds_waterfilling(duals, ens, kTiming);
    const auto residuals = waterfilling_stationarity_residuals(policy, duals, ens, kTiming);
    for (double r : residuals) CHECK(std::fabs(r) <= 1e-9);
    for (double g : policy.thresholds) CHECK(g >= duals.lambda_p * (1.0 - 1e-12));
  }
}

TEST_CASE("gamma-finding closed form agrees with a bisection root-finder") {
  // Monotonicity of Y makes each stage equation solvable by bisection on
  // [lambda_p, lambda_p * 1e6]; the Lambert-W values must match those roots.
  const DualPoint duals{0.6, 0.4};
  const auto ens = canonical_ensemble(2.0);
  const auto policy = thresholds_waterfilling(duals, ens, kTiming);

  double u = 0.0, s = 0.0, p = 0.0;
  for (std::size_t i = ens.count(); i-- > 0;) {
    const double c = kTiming.remaining_fraction(i + 1);
    const double rhs =
        std::max(u - duals.lambda_p * s - duals.lambda_d * (1.0 - p), 0.0);
    double lo = duals.lambda_p, hi = duals.lambda_p * 1e6;
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (Y(mid, duals.lambda_p, c) < rhs ? lo : hi) = mid;
    }
    const double root = 0.5 * (lo + hi);
    CHECK(policy.thresholds[i] == doctest::Approx(root).epsilon(1e-8));

    const double g = policy.thresholds[i];
    const double q = ens.free_prob[i] * ens.fading.ccdf(g);
    u = ens.free_prob[i] * c * rate_stage_integral(ens.fading, policy.power_rule, g) +
        (1.0 - q) * u;
    s = ens.free_prob[i] * c * power_stage_integral(ens.fading, policy.power_rule, g) +
        (1.0 - q) * s;
    p = q + (1.0 - q) * p;
  }
}

TEST_CASE("Y is strictly increasing in the threshold") {
  SplitMix64 rng(0x7731);
  for (int trial = 0; trial < 10000; ++trial) {
    const double lambda_p = oracles::rand_in(rng, 0.05, 5.0);
    const double gamma = oracles::rand_in(rng, 0.01, 10.0);
    const double delta = oracles::rand_in(rng, 1e-6, 2.0);
    const double c = oracles::rand_in(rng, 0.3, 1.0);
    CHECK(Y(gamma + delta, lambda_p, c) > Y(gamma, lambda_p, c));
  }
}

TEST_CASE("success probability is nondecreasing in lambda_d") {
  const auto ens = canonical_ensemble(1.0);
  double prev = -1.0;
  for (int k = 0; k < 100; ++k) {
    const double lambda_d = 0.05 * k;
    const double p = success_probability(thresholds_two_level(lambda_d, ens, kTiming), ens);
    CHECK(p >= prev - 1e-13);
    prev = p;
  }
}

TEST_CASE("average power is nonincreasing in lambda_p") {
  const auto ens = canonical_ensemble(1.0);
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 100; ++k) {
    const double lambda_p = 0.05 + 0.05 * k;
    const auto policy = thresholds_waterfilling({lambda_p, 0.2}, ens, kTiming);
    const double s = expected_power(policy, ens, kTiming);
    CHECK(s <= prev + 1e-13);
    prev = s;
  }
}

TEST_CASE("solve_optimal reduces to classic water-filling for one sure channel") {
  const auto ens = homogeneous_ensemble(1, 1.0, exponential_fading(1.0));
  const Constraints cons{0.4, 1e6};
  const auto report = solve_optimal(ens, kTiming, cons);
  CHECK(report.delay_status == DelayStatus::Inactive);
  CHECK(report.power_status == PowerStatus::Active);
  CHECK(report.policy.thresholds[0] ==
        doctest::Approx(report.duals.lambda_p).epsilon(1e-12));
  CHECK(report.metrics.avg_power == doctest::Approx(0.4).epsilon(1e-8));

  // independent scalar bisection on the quadrature-evaluated power curve
  const auto budget_residual = [&](double lambda_p) {
    const PowerRule rule = waterfilling_rule(1.0 / lambda_p);
    return 0.95 * power_stage_integral_quadrature(ens.fading, rule, lambda_p, 1e-13) -
           0.4;
  };
  double lo = 1e-6, hi = 10.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (budget_residual(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(report.duals.lambda_p == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-7));
}

TEST_CASE("solve_optimal: doubling the budget raises throughput") {
  const auto ens = homogeneous_ensemble(1, 1.0, exponential_fading(1.0));
  const auto base = solve_optimal(ens, kTiming, Constraints{0.4, 1e6});
  const auto rich = solve_optimal(ens, kTiming, Constraints{0.8, 1e6});
  CHECK(rich.metrics.throughput > base.metrics.throughput);
}

TEST_CASE("solve_optimal with an attainable delay bound") {
  const auto ens = canonical_ensemble(1.0);
  const Constraints cons{0.5, 2.2};
  const auto report = solve_optimal(ens, kTiming, cons);
  CHECK(report.delay_status == DelayStatus::Active);
  CHECK(report.duals.lambda_d > 0.0);
  CHECK(std::fabs(report.metrics.success_prob - 1.0 / 2.2) <= 1e-9);
  CHECK(std::fabs(report.metrics.avg_power - 0.5) <= 1e-9 * 0.5 + 1e-12);
  for (double g : report.policy.thresholds)
    CHECK(g >= report.duals.lambda_p * (1.0 - 1e-12));

  const auto residuals =
      waterfilling_stationarity_residuals(report.policy, report.duals, ens, kTiming);
  for (double r : residuals) CHECK(std::fabs(r) <= 1e-8);
  CHECK(std::fabs(report.duals.lambda_p * (report.metrics.avg_power - 0.5)) <= 1e-8);
  CHECK(std::fabs(report.duals.lambda_d * report.delay_slack) <= 1e-8);
}

TEST_CASE("solve_optimal with a delay bound the threshold family cannot reach") {
  const auto ens = canonical_ensemble(1.0);
  const auto two_level = solve_two_level(ens, kTiming, 1.5354);
  const Constraints cons{two_level.metrics.avg_power, 1.5354};
  const auto report = solve_optimal(ens, kTiming, cons);
  CHECK(report.delay_status == DelayStatus::Unattainable);
  CHECK(report.duals.lambda_d == 0.0);
  CHECK(report.delay_slack < 0.0);
  CHECK(report.metrics.avg_power ==
        doctest::Approx(two_level.metrics.avg_power).epsilon(1e-8));
  // complementary slackness still holds: the violated constraint carries a
  // zero multiplier
  CHECK(report.duals.lambda_d * report.delay_slack == 0.0);
}

TEST_CASE("solve_optimal: infeasible delay bound") {
  const auto ens = canonical_ensemble(1.0);
  CHECK_THROWS_AS(solve_optimal(ens, kTiming, Constraints{0.5, 1.1}), InfeasibleError);
}

TEST_CASE("threshold ordering diagnostic (non-gating)") {
  const auto ens = canonical_ensemble(1.0);
  const auto report = solve_two_level(ens, kTiming, 1.54);
  bool nonincreasing = true;
  for (std::size_t i = 0; i + 1 < 10; ++i)
    if (report.policy.thresholds[i] < report.policy.thresholds[i + 1] - 1e-12)
      nonincreasing = false;
  if (!nonincreasing) {
    std::string vec;
    for (double g : report.policy.thresholds) vec += std::to_string(g) + " ";
    MESSAGE("thresholds not monotone in sensing order: " << vec);
  }
  WARN(nonincreasing);
}

TEST_CASE("heterogeneous free probabilities") {
  const ChannelEnsemble ens{{0.4, 0.1, 0.7, 0.25}, exponential_fading(1.2)};
  const double d_min = min_expected_delay(ens);
  const auto report = solve_two_level(ens, kTiming, d_min * 1.05);
  CHECK(report.delay_status == DelayStatus::Active);
  CHECK(std::fabs(report.metrics.success_prob - 1.0 / (d_min * 1.05)) <= 1e-9);
  for (double r : two_level_stationarity_residuals(report.policy, report.duals.lambda_d,
                                                   ens, kTiming))
    CHECK(std::fabs(r) <= 1e-8);

  const auto wf = solve_optimal(ens, kTiming, Constraints{0.6, d_min * 1.5});
  CHECK(std::fabs(wf.metrics.avg_power - 0.6) <= 1e-9 * 0.6 + 1e-12);
  for (double r : waterfilling_stationarity_residuals(wf.policy, wf.duals, ens, kTiming))
    CHECK(std::fabs(r) <= 1e-8);
}

TEST_CASE("toy-scale constrained optimality against an exhaustive grid") {
  // Scaled-down companion of the acceptance oracle: coarser grid, two channels.
  const auto ens = homogeneous_ensemble(2, 0.5, exponential_fading(1.0));
  const double d_max = 1.45;
  const auto report = solve_two_level(ens, kTiming, d_max);

  const double p_req = 1.0 / d_max;
  const int n = 400;  // step 0.01 on [0, 4]
  std::vector<double> fbar(n + 1), rate(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double g = 0.01 * k;
    fbar[k] = ens.fading.ccdf(g);
    rate[k] = rate_stage_integral(ens.fading, constant_one_power(), g);
  }
  const double c1 = kTiming.remaining_fraction(1);
  const double c2 = kTiming.remaining_fraction(2);
  double best = -1.0;
  for (int k1 = 0; k1 <= n; ++k1) {
    for (int k2 = 0; k2 <= n; ++k2) {
      const double q1 = 0.5 * fbar[k1];
      const double q2 = 0.5 * fbar[k2];
      const double p = q1 + (1.0 - q1) * q2;
      if (p < p_req) continue;
      const double u = 0.5 * c1 * rate[k1] + (1.0 - q1) * 0.5 * c2 * rate[k2];
      if (u > best) best = u;
    }
  }
  CHECK(report.metrics.throughput >= best - 1e-12);
  CHECK(std::fabs(report.metrics.throughput - best) <= 2e-3);
}
