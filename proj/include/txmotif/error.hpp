#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace txmotif {

enum class ErrorCode {
  MissingFile,
  MalformedRow,
  DuplicateTxId,
  NonPositivePrice,
  UnparseableDate,
  OrderOutOfRange,
  PriceMissing,
  TooFewRows,
  SingularSystem,
  DimensionMismatch,
  BadDecay,
  BadWindow,
  LengthMismatch,
  MissingOffset,
  EmptyInput,
  NonPositiveTruth,
  InsufficientData,
  BadSpec,
  BadModelFile,
};

std::string_view to_string(ErrorCode code);

/// Single exception type for every data/contract failure in the library.
/// The code identifies the failure class; what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace txmotif
