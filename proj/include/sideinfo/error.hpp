#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sideinfo {

enum class ErrorKind {
  NegativeMass,
  NotNormalized,
  ZeroConditioningEvent,
  InvalidArgument,
  UnknownLoss,
  UnboundedBelow,
  NotProper,
  AlphabetTooLarge,
  ParameterOutOfRange,
  HorizonTooLarge,
  NotStationary,
  DidNotConverge,
  SchemaError,
  ValidationError,
  EmptySample,
  UnknownSymbol,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so callers (notably the
/// CLI exit-code mapping) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sideinfo
