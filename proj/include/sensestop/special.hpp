#ifndef SENSESTOP_SPECIAL_HPP
#define SENSESTOP_SPECIAL_HPP

namespace sensestop {

/// Evaluation controls for the Maclaurin series of W0 and for the iterative
/// refinement used by the production evaluator.
struct SeriesControl {
  int max_terms = 500;
  double abs_tol = 1e-13;
  int max_newton_iters = 60;

  void validate() const;
};

/// Principal branch of the Lambert W function on [-1/e, inf).
///
/// Returns w >= -1 with w*exp(w) = z to |w e^w - z| <= 1e-12 * max(1, |z|).
/// Arguments up to 1e-12 below -1/e are treated as branch-point rounding and
/// clamped; anything lower throws std::domain_error.
///
/// Uses the branch-point expansion in sqrt(2(ez+1)) near z = -1/e (where the
/// defining equation is ill-conditioned) and Halley refinement elsewhere.
double lambert_w0(double z, const SeriesControl& ctl = SeriesControl{});

/// Partial sum of the Maclaurin series sum_{n>=1} (-n)^{n-1}/n! z^n.
///
/// Converges only for |z| < 1/e; arguments outside that disc throw
/// std::domain_error. Kept as a slow independent cross-check of lambert_w0,
/// never used in the solver path.
double lambert_w0_series(double z, const SeriesControl& ctl = SeriesControl{});

/// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
/// Relative error <= 1e-10 (series below 1, continued fraction above).
double exp_integral_e1(double x);

/// exp(x) * E1(x); stays representable where exp(x) alone would overflow.
double exp_integral_e1_scaled(double x);

}  // namespace sensestop

#endif  // SENSESTOP_SPECIAL_HPP
