#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ads {

enum class ErrorCode {
  InvalidArgument,
  InsufficientData,
  AlreadyLabeled,
  UnknownId,
  ShapeMismatch,
  NonFinite,
  ZeroVector,
  Diverged,
  EmptyNegativePool,
  EmptyLabeledPool,
  ZeroBudget,
  SingleClass,
  LengthMismatch,
  EmptyPool,
  EmptyHistory,
  OracleTimeout,
  NotPending,
  BadLabel,
  BindFailure,
  IoFailure,
  InvalidConfig,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so that
// callers (CLI, HTTP service) can map it onto exit codes or status bodies.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ads
