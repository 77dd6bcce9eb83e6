#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace snoise {

// Every failure the library reports carries one of these codes. The names are
// the machine-readable identifiers printed by the CLI and returned through the
// C API.
enum class ErrorCode {
  InvalidArgument,
  NonFinite,
  DimensionMismatch,
  NotSeparable,
  ZeroAtOrigin,
  InconsistentKernel,
  InvalidBound,
  QuadratureFailure,
  UnsupportedMarks,
  KernelNotExponential,
  IntegrabilityFailure,
  ExplosionGuard,
  BlowUp,
  MgfDiverges,
  DegenerateJumps,
  ConfigError,
  IoError,
};

std::string_view error_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace snoise
