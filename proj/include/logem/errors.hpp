#pragma once

#include <stdexcept>
#include <string>

namespace logem {

enum class ErrorKind {
  Configuration,         // invalid parameters or config documents
  Usage,                 // API contract violated by the caller
  NumericInput,          // non-finite input values
  PositivityBreach,      // a log argument 1 + g*z <= 0
  Overflow,              // non-finite intermediate in a step
  Sequencing,            // delayed lookup of a node not yet computed
  Unsupported,           // oracle/reference preconditions not met
  ValidationUnsupported, // descriptor without closed-form constants
  InsufficientData,      // too few points for a rate fit
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; the kind drives CLI exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// Same kind, message prefixed with `context: `.
  Error with_context(const std::string& context) const {
    return Error(kind_, context + ": " + what());
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace logem
