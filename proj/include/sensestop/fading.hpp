#ifndef SENSESTOP_FADING_HPP
#define SENSESTOP_FADING_HPP

#include <cstdint>

namespace sensestop {

enum class FadingKind : std::uint8_t {
  Exponential,  // Rayleigh amplitude -> exponential power gain
};

/// Distribution of the per-channel power gain, i.i.d. across channels.
/// The gain is a dimensionless SNR per unit transmit power (unity noise
/// variance), so mean_gain is the average channel SNR at power 1.
struct FadingLaw {
  FadingKind kind = FadingKind::Exponential;
  double mean_gain = 1.0;

  void validate() const;

  /// Density f(x), x >= 0. Throws std::domain_error for negative x.
  double pdf(double x) const;

  /// Complementary CDF F(x) = P[gain > x], x >= 0 (x = +inf allowed).
  double ccdf(double x) const;
};

inline FadingLaw exponential_fading(double mean_gain) {
  FadingLaw law{FadingKind::Exponential, mean_gain};
  law.validate();
  return law;
}

}  // namespace sensestop

#endif  // SENSESTOP_FADING_HPP
