#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sps {

// Every failure the library can report. The numeric values are mirrored by
// sps_status in the C API and must stay stable.
enum class ErrorCode : int {
  kParse = 1,
  kDimension = 2,
  kNonFinite = 3,
  kSingular = 4,
  kComplexSpectrum = 5,
  kNonNegativeEigenvalue = 6,
  kRepeatedEigenvalue = 7,
  kKernelDimension = 8,
  kResonance = 9,
  kMissingCoefficient = 10,
  kBudget = 11,
  kOverflow = 12,
  kFitNonConvergence = 13,
  kFitSingularJacobian = 14,
  kTailDrift = 15,
  kDivergence = 16,
  kMissingInitialState = 17,
  kInvalidArgument = 18,
  kReduction = 19,
  kIo = 20,
  kInternal = 21,
};

// Stable machine-readable name, e.g. "SPS_E_COMPLEX_SPECTRUM".
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sps
