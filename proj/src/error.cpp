#include "sideinfo/error.hpp"

namespace sideinfo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NegativeMass: return "NegativeMass";
    case ErrorKind::NotNormalized: return "NotNormalized";
    case ErrorKind::ZeroConditioningEvent: return "ZeroConditioningEvent";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnknownLoss: return "UnknownLoss";
    case ErrorKind::UnboundedBelow: return "UnboundedBelow";
    case ErrorKind::NotProper: return "NotProper";
    case ErrorKind::AlphabetTooLarge: return "AlphabetTooLarge";
    case ErrorKind::ParameterOutOfRange: return "ParameterOutOfRange";
    case ErrorKind::HorizonTooLarge: return "HorizonTooLarge";
    case ErrorKind::NotStationary: return "NotStationary";
    case ErrorKind::DidNotConverge: return "DidNotConverge";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::UnknownSymbol: return "UnknownSymbol";
  }
  return "Unknown";
}

}  // namespace sideinfo
