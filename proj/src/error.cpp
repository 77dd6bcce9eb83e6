#include "snoise/error.hpp"

namespace snoise {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotSeparable: return "NotSeparable";
    case ErrorCode::ZeroAtOrigin: return "ZeroAtOrigin";
    case ErrorCode::InconsistentKernel: return "InconsistentKernel";
    case ErrorCode::InvalidBound: return "InvalidBound";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::UnsupportedMarks: return "UnsupportedMarks";
    case ErrorCode::KernelNotExponential: return "KernelNotExponential";
    case ErrorCode::IntegrabilityFailure: return "IntegrabilityFailure";
    case ErrorCode::ExplosionGuard: return "ExplosionGuard";
    case ErrorCode::BlowUp: return "BlowUp";
    case ErrorCode::MgfDiverges: return "MgfDiverges";
    case ErrorCode::DegenerateJumps: return "DegenerateJumps";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace snoise
