#include "sps/core/error.hpp"

namespace sps {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kParse: return "SPS_E_PARSE";
    case ErrorCode::kDimension: return "SPS_E_DIMENSION";
    case ErrorCode::kNonFinite: return "SPS_E_NONFINITE";
    case ErrorCode::kSingular: return "SPS_E_SINGULAR";
    case ErrorCode::kComplexSpectrum: return "SPS_E_COMPLEX_SPECTRUM";
    case ErrorCode::kNonNegativeEigenvalue: return "SPS_E_NONNEGATIVE_EIGENVALUE";
    case ErrorCode::kRepeatedEigenvalue: return "SPS_E_REPEATED_EIGENVALUE";
    case ErrorCode::kKernelDimension: return "SPS_E_KERNEL_DIMENSION";
    case ErrorCode::kResonance: return "SPS_E_RESONANCE";
    case ErrorCode::kMissingCoefficient: return "SPS_E_MISSING_COEFFICIENT";
    case ErrorCode::kBudget: return "SPS_E_BUDGET";
    case ErrorCode::kOverflow: return "SPS_E_OVERFLOW";
    case ErrorCode::kFitNonConvergence: return "SPS_E_FIT_NONCONVERGENCE";
    case ErrorCode::kFitSingularJacobian: return "SPS_E_FIT_SINGULAR_JACOBIAN";
    case ErrorCode::kTailDrift: return "SPS_E_TAIL_DRIFT";
    case ErrorCode::kDivergence: return "SPS_E_DIVERGENCE";
    case ErrorCode::kMissingInitialState: return "SPS_E_MISSING_INITIAL_STATE";
    case ErrorCode::kInvalidArgument: return "SPS_E_INVALID_ARGUMENT";
    case ErrorCode::kReduction: return "SPS_E_REDUCTION";
    case ErrorCode::kIo: return "SPS_E_IO";
    case ErrorCode::kInternal: return "SPS_E_INTERNAL";
  }
  return "SPS_E_UNKNOWN";
}

}  // namespace sps
