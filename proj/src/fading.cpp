#include "sensestop/fading.hpp"

#include <cmath>

#include "sensestop/errors.hpp"

namespace sensestop {

void FadingLaw::validate() const {
  detail::require(mean_gain > 0.0 && std::isfinite(mean_gain),
                  "FadingLaw: mean_gain must be positive and finite");
}

double FadingLaw::pdf(double x) const {
  detail::require_domain(!(x < 0.0) && !std::isnan(x), "FadingLaw::pdf: x must be >= 0");
  switch (kind) {
    case FadingKind::Exponential:
      return std::exp(-x / mean_gain) / mean_gain;
  }
  return 0.0;  // unreachable
}

double FadingLaw::ccdf(double x) const {
  detail::require_domain(!(x < 0.0) && !std::isnan(x), "FadingLaw::ccdf: x must be >= 0");
  switch (kind) {
    case FadingKind::Exponential:
      return std::exp(-x / mean_gain);
  }
  return 0.0;  // unreachable
}

}  // namespace sensestop
