#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nltracer {

enum class ErrorCode {
  InvalidArgument,
  NegativeTime,
  UnsupportedOrder,
  OutOfRange,
  QuadratureFailure,
  NotApplicable,
  NoValidConstants,
  CflViolation,
  NonFiniteField,
  InsufficientPrehistoryDepth,
  InsufficientHistory,
  NegativeWeight,
  NonPositiveValues,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; `code()` distinguishes the cause.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what) {}

  ErrorCode code() const noexcept { return code_; }
  /// what() without the code prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace nltracer
