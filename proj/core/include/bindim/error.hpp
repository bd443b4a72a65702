#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bindim {

enum class ErrorCode {
  invalid_argument,
  format,
  empty_dataset,
  undefined_margins,
  insufficient_mass,
  degenerate_range,
  degenerate,
  no_root,
  saturation,
  undefined_correlation,
};

std::string_view to_string(ErrorCode code);

/// Structured failure raised by every operation in the library. The code
/// says what went wrong; the message carries the diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for malformed input or arguments (CLI exit code 2), false for
  /// failures of the computation itself (exit code 1).
  bool is_usage_error() const noexcept {
    return code_ == ErrorCode::invalid_argument || code_ == ErrorCode::format;
  }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace bindim
