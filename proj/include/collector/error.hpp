#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collector {

enum class ErrorCode {
  kMalformedWire,
  kSchemaViolation,
  kInvariantViolation,
  kInvalidUsername,
  kWeakPassword,
  kDuplicateUser,
  kBadCredentials,
  kNotAuthenticated,
  kForbidden,
  kBadRange,
  kUnknownUser,
  kStorageFailure,
};

std::string_view to_string(ErrorCode code);

/// Error raised by every collector operation. `field()` names the offending
/// record field or request parameter when there is one.
class Error : public std::runtime_error {
 public:
  explicit Error(ErrorCode code, std::string field = {}, std::string detail = {});

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& detail() const noexcept { return detail_; }

  /// Short machine-readable form used in HTTP bodies, e.g. "InvariantViolation(up_ms)".
  std::string wire_text() const;

 private:
  ErrorCode code_;
  std::string field_;
  std::string detail_;
};

}  // namespace collector
