#include "logem/errors.hpp"

namespace logem {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Configuration: return "configuration";
    case ErrorKind::Usage: return "usage";
    case ErrorKind::NumericInput: return "numeric_input";
    case ErrorKind::PositivityBreach: return "positivity_breach";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Sequencing: return "sequencing";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::ValidationUnsupported: return "validation_unsupported";
    case ErrorKind::InsufficientData: return "insufficient_data";
  }
  return "unknown";
}

}  // namespace logem
