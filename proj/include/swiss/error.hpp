#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace swiss {

enum class ErrorCode {
  RepeatedPairing,
  DuplicateBye,
  UnknownPlayer,
  InvalidRecord,
  InvalidRoster,
  InvalidGraph,
  NoPerfectMatching,
  TooLarge,
  AllPlayersHadBye,
  EncodingOverflow,
  NoLegalPairing,
  DomainError,
  CalibrationFailed,
  EmptySupport,
  InvalidConfig,
  ParseError,
  InvariantViolation,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// that callers (CLI exit codes, HTTP status mapping) can dispatch on it.
class SwissError : public std::runtime_error {
 public:
  SwissError(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw SwissError(code, message);
}

}  // namespace swiss
