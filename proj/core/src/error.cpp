#include "fvcbfit/error.hpp"

namespace fvcb {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidValue: return "InvalidValue";
    case ErrorCode::kInconsistentGroup: return "InconsistentGroup";
    case ErrorCode::kEmptyCurve: return "EmptyCurve";
    case ErrorCode::kSeriesTooShort: return "SeriesTooShort";
    case ErrorCode::kTooFewPoints: return "TooFewPoints";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNonPositiveC: return "NonPositiveC";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kZeroVariance: return "ZeroVariance";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kDivergence: return "Divergence";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace fvcb
