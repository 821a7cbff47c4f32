#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cardioreg {

enum class ErrorCode {
  EmptyInput,
  SingularTransform,
  ShapeMismatch,
  DegenerateConfiguration,
  InvalidParameter,
  NumericalCollapse,
  IndexOutOfBounds,
  ParseError,
  InvalidData,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Single exception type for the library; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace cardioreg
