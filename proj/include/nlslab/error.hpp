#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nlslab {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NonConvergence,
  NegativePhase,
  NumericalFailure,
  InsufficientRecords,
  InsufficientData,
  InsufficientCrossings,
  DegenerateFit,
  DivisionByZero,
  EmptyFamily,
  BadMagic,
  VersionMismatch,
  TruncatedFile,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Library error carrying a machine-checkable kind.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace nlslab
