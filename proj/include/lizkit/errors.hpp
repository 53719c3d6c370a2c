#pragma once

#include <stdexcept>
#include <string>

namespace lizkit {

/// Failure with a machine-readable kind, e.g. "AlphaTooSmall" or "DuplicateAtoms".
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

namespace errc {
inline constexpr const char* kInvalidArgument = "InvalidArgument";
inline constexpr const char* kNonZeroMeanForIntegral = "NonZeroMeanForIntegral";
inline constexpr const char* kAlphaTooSmall = "AlphaTooSmall";
inline constexpr const char* kDuplicateAtoms = "DuplicateAtoms";
inline constexpr const char* kDistributionalCase = "DistributionalCase";
inline constexpr const char* kOriginSingularity = "OriginSingularity";
inline constexpr const char* kNotInValidRegime = "NotInValidRegime";
inline constexpr const char* kNonUnitDirection = "NonUnitDirection";
inline constexpr const char* kMultiIndexTooLarge = "MultiIndexTooLarge";
inline constexpr const char* kUnsupportedDimension = "UnsupportedDimension";
inline constexpr const char* kBoundaryMass = "BoundaryMass";
inline constexpr const char* kDirectionNotOnGrid = "DirectionNotOnGrid";
inline constexpr const char* kNotConverged = "NotConverged";
inline constexpr const char* kInfeasibleInterpolation = "InfeasibleInterpolation";
inline constexpr const char* kInputNotFound = "InputNotFound";
inline constexpr const char* kSchemaMismatch = "SchemaMismatch";
inline constexpr const char* kParseError = "ParseError";
}  // namespace errc

}  // namespace lizkit
