#include "sensestop/special.hpp"

#include <cmath>

#include "sensestop/errors.hpp"

namespace sensestop {

namespace {

constexpr double kE = 2.718281828459045235;
constexpr double kInvE = 0.36787944117144233;  // 1/e
constexpr double kEulerGamma = 0.57721566490153286;
constexpr double kBranchSlack = 1e-12;

// Branch-point expansion W0(z) = sum mu_k p^k, p = sqrt(2(e z + 1)).
double branch_series(double p) {
  constexpr double mu2 = -1.0 / 3.0;
  constexpr double mu3 = 11.0 / 72.0;
  constexpr double mu4 = -43.0 / 540.0;
  constexpr double mu5 = 769.0 / 17280.0;
  constexpr double mu6 = -221.0 / 8505.0;
  constexpr double mu7 = 680863.0 / 43545600.0;
  return -1.0 +
         p * (1.0 +
              p * (mu2 + p * (mu3 + p * (mu4 + p * (mu5 + p * (mu6 + p * mu7))))));
}

}  // namespace

void SeriesControl::validate() const {
  detail::require(max_terms >= 1, "SeriesControl: max_terms must be >= 1");
  detail::require(abs_tol > 0.0, "SeriesControl: abs_tol must be positive");
  detail::require(max_newton_iters >= 1, "SeriesControl: max_newton_iters must be >= 1");
}

double lambert_w0(double z, const SeriesControl& ctl) {
  ctl.validate();
  detail::require_domain(!std::isnan(z), "lambert_w0: z is NaN");
  const double q = z + kInvE;
  detail::require_domain(q >= -kBranchSlack, "lambert_w0: z below -1/e");
  if (q <= 0.0) return -1.0;  // branch-point rounding
  if (std::isinf(z)) return z;

  const double p = std::sqrt(2.0 * kE * q);
  if (p < 0.01) return branch_series(p);  // exact to ~1e-18 here

  // Initial guess per region, then Halley refinement.
  double w;
  if (z < -0.30) {
    w = branch_series(p);
  } else if (z < 0.5) {
    w = z * (1.0 - z);
  } else if (z < 3.0) {
    w = std::log1p(z);
  } else {
    const double l1 = std::log(z);
    const double l2 = std::log(l1);
    w = l1 - l2 + l2 / l1;
  }

  for (int it = 0; it < ctl.max_newton_iters; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    const double step = f / denom;
    w -= step;
    if (w < -1.0) w = -1.0 + 1e-14;
    if (std::fabs(step) <= 4e-16 * (1.0 + std::fabs(w))) break;
  }
  return w;
}

double lambert_w0_series(double z, const SeriesControl& ctl) {
  ctl.validate();
  detail::require_domain(std::fabs(z) < kInvE,
                         "lambert_w0_series: series converges only for |z| < 1/e");
  if (z == 0.0) return 0.0;
  double term = z;  // n = 1
  double sum = z;
  for (int n = 1; n < ctl.max_terms; ++n) {
    term *= -z * std::pow(1.0 + 1.0 / n, n - 1);
    sum += term;
    if (std::fabs(term) <= ctl.abs_tol) break;
  }
  return sum;
}

namespace {

// Alternating series, adequate for x <= 1: E1 = -gamma - ln x - sum (-x)^k/(k k!).
double e1_series(double x) {
  double sum = -kEulerGamma - std::log(x);
  double u = 1.0;
  for (int k = 1; k <= 100; ++k) {
    u *= -x / k;
    const double contrib = -u / k;
    sum += contrib;
    if (std::fabs(contrib) <= 1e-17 * std::fabs(sum)) break;
  }
  return sum;
}

// Modified Lentz continued fraction for x >= 1; returns exp(x) E1(x).
double e1_cf_scaled(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 400; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) break;
  }
  return h;
}

}  // namespace

double exp_integral_e1(double x) {
  detail::require_domain(x > 0.0, "exp_integral_e1: x must be positive");
  if (x <= 1.0) return e1_series(x);
  return e1_cf_scaled(x) * std::exp(-x);
}

double exp_integral_e1_scaled(double x) {
  detail::require_domain(x > 0.0, "exp_integral_e1_scaled: x must be positive");
  if (std::isinf(x)) return 0.0;
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_cf_scaled(x);
}

}  // namespace sensestop
