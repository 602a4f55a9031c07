#include "scmm/error.hpp"

namespace scmm {

const char* errc_name(Errc c) {
    switch (c) {
    case Errc::NotPrime: return "NotPrime";
    case Errc::OutOfRange: return "OutOfRange";
    case Errc::InverseOfZero: return "InverseOfZero";
    case Errc::EvenFieldDivision: return "EvenFieldDivision";
    case Errc::ShapeMismatch: return "ShapeMismatch";
    case Errc::FieldMismatch: return "FieldMismatch";
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::DuplicatePoint: return "DuplicatePoint";
    case Errc::NoConsistentK: return "NoConsistentK";
    case Errc::InconsistentOffDiagonals: return "InconsistentOffDiagonals";
    case Errc::AsymmetryDetected: return "AsymmetryDetected";
    case Errc::DivisibilityViolation: return "DivisibilityViolation";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ScaleExceeded: return "ScaleExceeded";
    case Errc::NoSolution: return "NoSolution";
    case Errc::UnknownScheme: return "UnknownScheme";
    case Errc::DegenerateDenominator: return "DegenerateDenominator";
    case Errc::SpecViolation: return "SpecViolation";
    case Errc::MalformedBundle: return "MalformedBundle";
    case Errc::InsufficientOutputs: return "InsufficientOutputs";
    case Errc::DuplicateEvaluationPoint: return "DuplicateEvaluationPoint";
    case Errc::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

} // namespace scmm
