#include "perisem/errors.hpp"

namespace perisem {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidIndex: return "invalid-index";
    case ErrorKind::kBudget: return "budget";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kCapability: return "capability";
    case ErrorKind::kHorizonTooSmall: return "horizon-too-small";
    case ErrorKind::kInsufficientCoefficients: return "insufficient-coefficients";
    case ErrorKind::kInvalidParams: return "invalid-params";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace perisem
