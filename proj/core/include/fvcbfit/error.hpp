#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fvcb {

enum class ErrorCode {
  kMissingColumn,
  kParseError,
  kInvalidValue,
  kInconsistentGroup,
  kEmptyCurve,
  kSeriesTooShort,
  kTooFewPoints,
  kDomainError,
  kNonPositiveC,
  kLengthMismatch,
  kZeroVariance,
  kNonFinite,
  kDivergence,
  kIoError,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

// All library failures are reported through this type; `code()` carries the
// category so front-ends can map it to exit statuses.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fvcb
