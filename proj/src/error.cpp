#include "collector/error.hpp"

namespace collector {
namespace {

std::string compose(ErrorCode code, const std::string& field, const std::string& detail) {
  std::string text(to_string(code));
  if (!field.empty()) text += "(" + field + ")";
  if (!detail.empty()) text += ": " + detail;
  return text;
}

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedWire: return "MalformedWire";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kInvalidUsername: return "InvalidUsername";
    case ErrorCode::kWeakPassword: return "WeakPassword";
    case ErrorCode::kDuplicateUser: return "DuplicateUser";
    case ErrorCode::kBadCredentials: return "BadCredentials";
    case ErrorCode::kNotAuthenticated: return "NotAuthenticated";
    case ErrorCode::kForbidden: return "Forbidden";
    case ErrorCode::kBadRange: return "BadRange";
    case ErrorCode::kUnknownUser: return "UnknownUser";
    case ErrorCode::kStorageFailure: return "StorageFailure";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, std::string field, std::string detail)
    : std::runtime_error(compose(code, field, detail)),
      code_(code),
      field_(std::move(field)),
      detail_(std::move(detail)) {}

std::string Error::wire_text() const {
  std::string text(to_string(code_));
  if (!field_.empty()) text += "(" + field_ + ")";
  return text;
}

}  // namespace collector
