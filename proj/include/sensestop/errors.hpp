#ifndef SENSESTOP_ERRORS_HPP
#define SENSESTOP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sensestop {

/// Requested constraint set cannot be met by any stopping policy
/// (e.g. a delay bound below the minimum expected delay).
class InfeasibleError : public std::runtime_error {
 public:
  explicit InfeasibleError(const std::string& what) : std::runtime_error(what) {}
};

/// A root-finder ran out of iterations before reaching its tolerance.
class NonConvergenceError : public std::runtime_error {
 public:
  explicit NonConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

/// Bracket expansion failed to enclose a sign change.
class NoBracketError : public NonConvergenceError {
 public:
  explicit NoBracketError(const std::string& what) : NonConvergenceError(what) {}
};

/// A simulated packet exceeded the per-packet slot cap (success probability
/// is zero or numerically indistinguishable from it).
class InfiniteDelayError : public std::runtime_error {
 public:
  explicit InfiniteDelayError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

inline void require_domain(bool condition, const char* message) {
  if (!condition) throw std::domain_error(message);
}

}  // namespace detail

}  // namespace sensestop

#endif  // SENSESTOP_ERRORS_HPP
