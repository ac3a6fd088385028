#ifndef SENSESTOP_QUADRATURE_HPP
#define SENSESTOP_QUADRATURE_HPP

#include <functional>

namespace sensestop {

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b].
/// Subdivides until the local K15-G7 discrepancy meets the tolerance budget.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double abs_tol = 1e-10, int max_depth = 50);

/// Integral of f over [a, inf) for integrands dominated by an exp(-x/scale)
/// tail: integrates [a, a + 40*scale] adaptively, where the remaining tail is
/// below the e^-40 level of the integrand and can be dropped against abs_tol.
double integrate_exponential_tail(const std::function<double(double)>& f, double a,
                                  double scale, double abs_tol = 1e-10);

}  // namespace sensestop

#endif  // SENSESTOP_QUADRATURE_HPP
