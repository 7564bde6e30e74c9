#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace semiab {

enum class ErrorKind {
  InvalidArgument,
  Parse,
  NonSquarefree,
  PrecisionUnreachable,
  ZeroInput,
  NoConvergence,
  OverflowAtIterate,
  DomainEscape,
  SingularCurve,
  CoordinateOverflow,
  PoleAtLatticePoint,
  FiberZero,
  UnsupportedPointClass,
  NoRationalDivision,
  OrbitTooLarge,
  EmptyOrbit,
  ModelMismatch,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (and the CLI
// exit-code mapping) can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace semiab
