#pragma once

#include <cmath>
#include <limits>

namespace gencert {

// Divergences live on [0, +inf]; +inf is a legitimate value, not an error.
inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline bool is_pos_inf(double x) { return x == kInf; }

// a - b on the extended reals where (+inf) - (+inf) is taken as 0. Used for
// per-step increments of divergence traces that sit at +inf.
inline double extended_increment(double next, double prev) {
  if (next == kInf && prev == kInf) return 0.0;
  return next - prev;
}

}  // namespace gencert
