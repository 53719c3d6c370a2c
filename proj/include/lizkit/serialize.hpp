#pragma once

#include <string>

#include "json.hpp"
#include "lizkit/fourier.hpp"
#include "lizkit/solver.hpp"

namespace lizkit {

using Json = nlohmann::json;

/// {"period": T, "coeffs": [[re, im], ...]} for n = -N..N
Json to_json(const FourierSeries& s);
FourierSeries fourier_series_from_json(const Json& j);

/// {"period": T, "atoms": [[a, t], ...]}
Json to_json(const AtomicMeasure1D& mu);
AtomicMeasure1D atomic_measure_from_json(const Json& j);

/// Kernel descriptor {"family": "fraclap"|"ridge", "alpha": a, "m": m, "d": d}.
struct KernelDescriptor {
  std::string family;
  double alpha = 0.0;
  int m = 0;
  int d = 1;
};
Json to_json(const KernelDescriptor& k);
KernelDescriptor kernel_descriptor_from_json(const Json& j);

/// {"family": ..., "params": {...}, "offset" | "poly": ..., "atoms": [[a, loc...], ...]}.
/// Doubles are written in shortest round-trip form, so reading back is exact.
Json to_json(const Model& model);
Model model_from_json(const Json& j);

Json to_json(const Family& family);
Family family_from_json(const std::string& name, const Json& params);

void write_json(const std::string& path, const Json& j);
/// Errors: InputNotFound, ParseError.
Json read_json(const std::string& path);

}  // namespace lizkit
