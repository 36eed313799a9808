#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace galex {

enum class ErrorCode {
  DuplicateName,
  MalformedTable,
  EmptyContext,
  InvalidSet,
  CapacityExceeded,
  UnknownConcept,
  UnknownAttribute,
  UnknownObject,
  InvalidThreshold,
  NotAdjacent,
  UnknownSession,
  BadRequest,
};

constexpr std::string_view code_name(ErrorCode c) noexcept {
  switch (c) {
    case ErrorCode::DuplicateName: return "DuplicateName";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::EmptyContext: return "EmptyContext";
    case ErrorCode::InvalidSet: return "InvalidSet";
    case ErrorCode::CapacityExceeded: return "CapacityExceeded";
    case ErrorCode::UnknownConcept: return "UnknownConcept";
    case ErrorCode::UnknownAttribute: return "UnknownAttribute";
    case ErrorCode::UnknownObject: return "UnknownObject";
    case ErrorCode::InvalidThreshold: return "InvalidThreshold";
    case ErrorCode::NotAdjacent: return "NotAdjacent";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::BadRequest: return "BadRequest";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(code_name(code)) + ": " + detail), code_(code), detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace galex
