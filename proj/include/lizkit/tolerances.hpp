#pragma once

namespace lizkit {

/// Numerical thresholds shared by the operators. Exact identities of the
/// continuous theory are checked against these in floating point.
struct Tolerances {
  double pointwise = 1e-9;
  double coefficient = 1e-12;
  /// |s[0]| <= mean_zero * max|s[n]| counts as mean-zero.
  double mean_zero = 1e-12;
  /// Minimum separation of atom locations, relative to the domain size.
  double atom_gap = 1e-12;
  /// Allowed deviation of a direction vector from unit norm.
  double unit_norm = 1e-12;
};

inline constexpr int kDefaultTruncation = 512;

}  // namespace lizkit
