#include "bindim/error.hpp"

namespace bindim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::format: return "format-error";
    case ErrorCode::empty_dataset: return "empty-dataset";
    case ErrorCode::undefined_margins: return "undefined-margins";
    case ErrorCode::insufficient_mass: return "insufficient-mass";
    case ErrorCode::degenerate_range: return "degenerate-range";
    case ErrorCode::degenerate: return "degenerate";
    case ErrorCode::no_root: return "no-root";
    case ErrorCode::saturation: return "saturation";
    case ErrorCode::undefined_correlation: return "undefined-correlation";
  }
  return "unknown";
}

}  // namespace bindim
