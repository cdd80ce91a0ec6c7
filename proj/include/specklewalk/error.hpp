#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specklewalk {

enum class ErrorKind {
  InvalidConfig,
  InvalidArgument,
  Dimension,
  Statistics,
  DegenerateTarget,
  DegenerateField,
  InvalidProbability,
  Estimation,
  Fit,
  PsdViolation,
  Format,
  Io,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid-config";
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Statistics: return "statistics";
    case ErrorKind::DegenerateTarget: return "degenerate-target";
    case ErrorKind::DegenerateField: return "degenerate-field";
    case ErrorKind::InvalidProbability: return "invalid-probability";
    case ErrorKind::Estimation: return "estimation";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::PsdViolation: return "psd-violation";
    case ErrorKind::Format: return "format";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library; the kind is what callers branch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace specklewalk
