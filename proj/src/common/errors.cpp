#include "privade/common/errors.hpp"

namespace privade {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::UnsupportedLevel: return "UnsupportedLevel";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidCut: return "InvalidCut";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::EmptyComplement: return "EmptyComplement";
    case ErrorCode::CommitmentMismatch: return "CommitmentMismatch";
    case ErrorCode::PlanInvalid: return "PlanInvalid";
    case ErrorCode::Unachievable: return "Unachievable";
    case ErrorCode::RowTooShort: return "RowTooShort";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::Malformed: return "Malformed";
    case ErrorCode::MalformedTranscript: return "MalformedTranscript";
    case ErrorCode::TxRejected: return "TxRejected";
    case ErrorCode::WrongPreimage: return "WrongPreimage";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Timeout: return "Timeout";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace privade
