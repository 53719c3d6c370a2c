#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace lizkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitNotConverged = 2;

struct FamilyArgs {
  std::string family = "periodic";
  std::optional<double> alpha;
  double period = 1.0;
  int order = 512;
  int m = 2;
  std::optional<int> dim;
  bool polynomial = false;
};

struct FitConfig {
  FamilyArgs family;
  std::string lambdas = "1e-3";
  bool interpolate = false;
  std::string loss = "quadratic";
  double delta = 1.0;
  std::string data;
  std::string out;
  std::string diagnostics;  ///< defaults to <out>.diagnostics.csv
  std::string residuals;    ///< defaults to <out>.residuals.csv
  double rel_gap = 1e-6;
  int max_iter = 200;
  double grid_jitter = 0.0;
  std::uint64_t seed = 0;
};

struct EvalConfig {
  std::string model;
  std::string points;  ///< CSV of locations, or empty to use the grid
  std::string grid = "0:1:101";
  std::string out;     ///< empty writes to stdout
};

struct VerifyConfig {
  std::vector<std::string> only;
  double tolerance_scale = 1.0;
  std::string out;
  std::uint64_t seed = 0;
};

struct GrowthConfig {
  std::string model;  ///< ridge model JSON; empty checks the kernel
  double alpha = 2.5;
  int dim = 1;
  std::string k;      ///< multi-index, comma separated; defaults to zeros
  double r_min = 1.0;
  double r_max = 100.0;
  int shells = 25;
  int directions = 16;
  double slope_tolerance = 0.02;
  std::string out;
};

/// Seed from LIZKIT_SEED when set, otherwise `fallback`.
std::uint64_t resolve_seed(std::uint64_t fallback);

int cmd_fit(const FitConfig& cfg);
int cmd_eval(const EvalConfig& cfg);
int cmd_verify(const VerifyConfig& cfg, const std::vector<std::string>& default_groups = {});
int cmd_growth(const GrowthConfig& cfg);

/// One-line JSON error record on stderr.
void report_error(const std::string& kind, const std::string& message);

}  // namespace lizkit::cli
