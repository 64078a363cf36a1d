#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace oplab {

enum class ErrorKind {
  NotHermitian,
  NonFinite,
  NotPsd,
  NotPositiveDefinite,
  NotPartialIsometry,
  DimensionMismatch,
  DimensionTooSmall,
  NotNormal,
  NotContraction,
  NotSemiHyponormal,
  Singular,
  InvalidArgument,
  InvalidDims,
  ConfigInvalid,
  ParseError,
  IoError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::NotPsd: return "NotPsd";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NotPartialIsometry: return "NotPartialIsometry";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::DimensionTooSmall: return "DimensionTooSmall";
    case ErrorKind::NotNormal: return "NotNormal";
    case ErrorKind::NotContraction: return "NotContraction";
    case ErrorKind::NotSemiHyponormal: return "NotSemiHyponormal";
    case ErrorKind::Singular: return "Singular";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InvalidDims: return "InvalidDims";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above; the
/// message is prefixed with the kind name so CLI output stays greppable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail)
      : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace oplab
