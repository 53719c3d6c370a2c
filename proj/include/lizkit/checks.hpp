#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lizkit {

struct CheckResult {
  std::string group;
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct CheckOptions {
  /// Groups to run; empty runs all.
  std::vector<std::string> only;
  /// Multiplies every tolerance.
  double tolerance_scale = 1.0;
  std::uint64_t seed = 0;
};

/// roundtrip, projector, mnorm, slice, inversion, adjoint, isotropy, parity,
/// ridge, growth, decay, seminorm.
std::vector<std::string> check_groups();
/// The Radon-domain subset.
std::vector<std::string> radon_check_groups();

/// Runs the invariant suite. A check passes when measured <= tolerance.
/// Error: InvalidArgument for an unknown group name.
std::vector<CheckResult> run_checks(const CheckOptions& options = {});

/// CSV with header check,measured,tolerance,pass.
std::string checks_csv(const std::vector<CheckResult>& results);

}  // namespace lizkit
