#pragma once

#include <cmath>
#include <numbers>

#include "etrate/errors.hpp"

namespace etrate::numeric {

inline constexpr double kLn2 = std::numbers::ln2;

/// Final bracket of a bisection: f(below) < 0 <= f(above).
struct Bracket {
  double below;
  double above;
  [[nodiscard]] double midpoint() const { return below + 0.5 * (above - below); }
};

/// Bisection for a sign change of `f` on [a, b]. The endpoints may be given in
/// either order of sign. Iterates until the bracket is no wider than
/// `abs_tol`, or until the midpoint can no longer be represented between the
/// endpoints.
template <typename F>
Bracket bisect(F&& f, double a, double b, double abs_tol = 0.0, int max_iter = 300) {
  double fa = f(a);
  double fb = f(b);
  if (std::isnan(fa) || std::isnan(fb) || (fa < 0.0) == (fb < 0.0)) {
    throw DomainError("bisect: endpoints do not bracket a sign change");
  }
  double below = fa < 0.0 ? a : b;
  double above = fa < 0.0 ? b : a;
  for (int i = 0; i < max_iter; ++i) {
    if (std::abs(above - below) <= abs_tol) break;
    const double mid = below + 0.5 * (above - below);
    if (mid == below || mid == above) break;
    if (f(mid) < 0.0) {
      below = mid;
    } else {
      above = mid;
    }
  }
  return {below, above};
}

/// log2(e^x - 1) for x > 0 without overflow for large x.
inline double log2_expm1(double x) {
  if (x > 30.0) return (x + std::log1p(-std::exp(-x))) / kLn2;
  return std::log2(std::expm1(x));
}

/// max{0, value}, returning exactly +0.0 for every non-positive or NaN input.
inline double clamp_nonnegative(double value) { return value > 0.0 ? value : 0.0; }

}  // namespace etrate::numeric
