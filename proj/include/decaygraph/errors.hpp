#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace decaygraph {

enum class ErrorCode {
  TrivialHopping,
  HoppingOutOfRange,
  InvalidRing,
  SymmetryViolation,
  EmptyConnectivity,
  InvalidChain,
  InvalidProduct,
  DimensionOverflow,
  InconsistentEntries,
  ConvergenceFailure,
  CertificationFailure,
  NotTwoSegment,
  UnderflowSites,
  ChainTooShort,
  ZeroAmplitude,
  ConventionMismatch,
  InvalidDrive,
  SingularSystem,
  IneligibleSpec,
  ParseError,
  ValidationError,
};

inline std::string_view to_string(ErrorCode code) noexcept;

// Compact rendering of a number for messages.
inline std::string show(double x) {
  std::ostringstream out;
  out << x;
  return out.str();
}

// All library failures are reported through this type. `detail` carries the
// numeric payload some codes need (offending offset, node, line).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, long detail = -1)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  long detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  long detail_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::TrivialHopping: return "TrivialHopping";
    case ErrorCode::HoppingOutOfRange: return "HoppingOutOfRange";
    case ErrorCode::InvalidRing: return "InvalidRing";
    case ErrorCode::SymmetryViolation: return "SymmetryViolation";
    case ErrorCode::EmptyConnectivity: return "EmptyConnectivity";
    case ErrorCode::InvalidChain: return "InvalidChain";
    case ErrorCode::InvalidProduct: return "InvalidProduct";
    case ErrorCode::DimensionOverflow: return "DimensionOverflow";
    case ErrorCode::InconsistentEntries: return "InconsistentEntries";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::CertificationFailure: return "CertificationFailure";
    case ErrorCode::NotTwoSegment: return "NotTwoSegment";
    case ErrorCode::UnderflowSites: return "UnderflowSites";
    case ErrorCode::ChainTooShort: return "ChainTooShort";
    case ErrorCode::ZeroAmplitude: return "ZeroAmplitude";
    case ErrorCode::ConventionMismatch: return "ConventionMismatch";
    case ErrorCode::InvalidDrive: return "InvalidDrive";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::IneligibleSpec: return "IneligibleSpec";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

}  // namespace decaygraph
