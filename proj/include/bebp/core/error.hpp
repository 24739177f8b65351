#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bebp {

enum class ErrorCode {
  ArityMismatch,
  LengthMismatch,
  DuplicateIndex,
  IndexOutOfRange,
  ArityTooLarge,
  CapExceeded,
  FixedArityFunctional,
  AsymmetricFunctional,
  DegenerateVariance,
  DimensionMismatch,
  EmptyConfiguration,
  TooFewPoints,
  TooFewSamples,
  NonpositiveValue,
  InvalidArgument,
  ConfigParse,
  UnknownId,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code so the
// CLI can map it onto an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool condition, ErrorCode code, const std::string& what) {
  if (!condition) fail(code, what);
}

}  // namespace bebp
