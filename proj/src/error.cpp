#include "semiab/error.hpp"

namespace semiab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Parse: return "Parse";
    case ErrorKind::NonSquarefree: return "NonSquarefree";
    case ErrorKind::PrecisionUnreachable: return "PrecisionUnreachable";
    case ErrorKind::ZeroInput: return "ZeroInput";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::OverflowAtIterate: return "OverflowAtIterate";
    case ErrorKind::DomainEscape: return "DomainEscape";
    case ErrorKind::SingularCurve: return "SingularCurve";
    case ErrorKind::CoordinateOverflow: return "CoordinateOverflow";
    case ErrorKind::PoleAtLatticePoint: return "PoleAtLatticePoint";
    case ErrorKind::FiberZero: return "FiberZero";
    case ErrorKind::UnsupportedPointClass: return "UnsupportedPointClass";
    case ErrorKind::NoRationalDivision: return "NoRationalDivision";
    case ErrorKind::OrbitTooLarge: return "OrbitTooLarge";
    case ErrorKind::EmptyOrbit: return "EmptyOrbit";
    case ErrorKind::ModelMismatch: return "ModelMismatch";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace semiab
