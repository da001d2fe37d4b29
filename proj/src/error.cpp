#include "txmotif/error.hpp"

namespace txmotif {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::DuplicateTxId: return "DuplicateTxId";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::UnparseableDate: return "UnparseableDate";
    case ErrorCode::OrderOutOfRange: return "OrderOutOfRange";
    case ErrorCode::PriceMissing: return "PriceMissing";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::BadDecay: return "BadDecay";
    case ErrorCode::BadWindow: return "BadWindow";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::MissingOffset: return "MissingOffset";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::NonPositiveTruth: return "NonPositiveTruth";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::BadSpec: return "BadSpec";
    case ErrorCode::BadModelFile: return "BadModelFile";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace txmotif
