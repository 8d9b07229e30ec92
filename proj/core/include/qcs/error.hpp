#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcs {

enum class ErrorCode {
  InvalidSupport,
  FrequencyOutOfRange,
  ModulationOverdrive,
  InvalidIntensity,
  InvalidArgument,
  OutOfWindow,
  Unbounded,
  EmptyMeasurement,
  SingularSystem,
  InsufficientData,
  Unreachable,
  MissingField,
  TypeMismatch,
  UnknownExperiment,
  ParseError,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the toolkit carries one of the codes above so
/// callers (and the CLI exit-code mapping) can branch without parsing text.
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

}  // namespace qcs
