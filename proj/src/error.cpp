#include "pubcat/error.hpp"

namespace pubcat {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::EmptyInput: return "EMPTY_INPUT";
    case ErrorCode::DuplicatePublisher: return "DUPLICATE_PUBLISHER";
    case ErrorCode::NegativeScore: return "NEGATIVE_SCORE";
    case ErrorCode::ZeroTotal: return "ZERO_TOTAL";
    case ErrorCode::Unsorted: return "UNSORTED";
    case ErrorCode::OutOfRange: return "OUT_OF_RANGE";
    case ErrorCode::InvalidParams: return "INVALID_PARAMS";
    case ErrorCode::DuplicateField: return "DUPLICATE_FIELD";
    case ErrorCode::DuplicateExpert: return "DUPLICATE_EXPERT";
    case ErrorCode::SampleTooLarge: return "SAMPLE_TOO_LARGE";
    case ErrorCode::OverlapError: return "OVERLAP";
    case ErrorCode::IllegalTransition: return "ILLEGAL_TRANSITION";
    case ErrorCode::RoundNotOpen: return "ROUND_NOT_OPEN";
    case ErrorCode::RoundClosed: return "ROUND_CLOSED";
    case ErrorCode::RoundNotClosed: return "ROUND_NOT_CLOSED";
    case ErrorCode::RoundNotStarted: return "ROUND_NOT_STARTED";
    case ErrorCode::UnknownExpert: return "UNKNOWN_EXPERT";
    case ErrorCode::UnknownPublisher: return "UNKNOWN_PUBLISHER";
    case ErrorCode::AmbiguousPublisher: return "AMBIGUOUS_PUBLISHER";
    case ErrorCode::InconsistentItem: return "INCONSISTENT_ITEM";
    case ErrorCode::KeyMismatch: return "KEY_MISMATCH";
    case ErrorCode::AllZero: return "ALL_ZERO";
    case ErrorCode::NotFinalized: return "NOT_FINALIZED";
    case ErrorCode::UnknownPanel: return "UNKNOWN_PANEL";
    case ErrorCode::UnknownRanking: return "UNKNOWN_RANKING";
    case ErrorCode::UnknownToken: return "UNKNOWN_TOKEN";
    case ErrorCode::DuplicatePanel: return "DUPLICATE_PANEL";
    case ErrorCode::Malformed: return "MALFORMED";
    case ErrorCode::StorageUnavailable: return "STORAGE_UNAVAILABLE";
    case ErrorCode::CorruptRecord: return "CORRUPT_RECORD";
  }
  return "UNKNOWN";
}

}  // namespace pubcat
