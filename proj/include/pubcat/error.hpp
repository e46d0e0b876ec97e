#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pubcat {

/// Machine-readable failure kinds shared by the engine, the store and the API.
enum class ErrorCode {
  // ranking
  EmptyInput,
  DuplicatePublisher,
  NegativeScore,
  ZeroTotal,
  Unsorted,
  OutOfRange,
  // sampling
  InvalidParams,
  DuplicateField,
  DuplicateExpert,
  SampleTooLarge,
  OverlapError,
  // delphi engine
  IllegalTransition,
  RoundNotOpen,
  RoundClosed,
  RoundNotClosed,
  RoundNotStarted,
  UnknownExpert,
  UnknownPublisher,
  AmbiguousPublisher,
  InconsistentItem,
  // analytics
  KeyMismatch,
  AllZero,
  NotFinalized,
  // gateway
  UnknownPanel,
  UnknownRanking,
  UnknownToken,
  DuplicatePanel,
  Malformed,
  StorageUnavailable,
  CorruptRecord,
};

/// Stable upper-snake identifier, e.g. ROUND_CLOSED.
std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pubcat
