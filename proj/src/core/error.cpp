#include "bebp/core/error.hpp"

namespace bebp {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::DuplicateIndex: return "DuplicateIndex";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::ArityTooLarge: return "ArityTooLarge";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::FixedArityFunctional: return "FixedArityFunctional";
    case ErrorCode::AsymmetricFunctional: return "AsymmetricFunctional";
    case ErrorCode::DegenerateVariance: return "DegenerateVariance";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptyConfiguration: return "EmptyConfiguration";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::NonpositiveValue: return "NonpositiveValue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ConfigParse: return "ConfigParse";
    case ErrorCode::UnknownId: return "UnknownId";
  }
  return "Unknown";
}

}  // namespace bebp
