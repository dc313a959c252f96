#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace privade {

enum class ErrorCode {
  ShapeMismatch,
  Overflow,
  DomainError,
  UnsupportedLevel,
  EmptyInput,
  IndexOutOfRange,
  InvalidCut,
  KTooLarge,
  EmptyComplement,
  CommitmentMismatch,
  PlanInvalid,
  Unachievable,
  RowTooShort,
  TooFewPoints,
  Malformed,
  MalformedTranscript,
  TxRejected,
  WrongPreimage,
  InvalidConfig,
  Io,
  Timeout,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace privade
