#pragma once

#include <stdexcept>
#include <string>

namespace perisem {

enum class ErrorKind {
  kInvalidIndex,
  kBudget,
  kConfig,
  kFormat,
  kCapability,
  kHorizonTooSmall,
  kInsufficientCoefficients,
  kInvalidParams,
  kIo,
};

const char* to_string(ErrorKind kind) noexcept;

/// Single exception type for the library. The kind tells callers (the CLI in
/// particular) how to classify the failure.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace perisem
