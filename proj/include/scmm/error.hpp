#pragma once

#include <stdexcept>
#include <string>

namespace scmm {

enum class Errc {
    NotPrime,
    OutOfRange,
    InverseOfZero,
    EvenFieldDivision,
    ShapeMismatch,
    FieldMismatch,
    SingularMatrix,
    DuplicatePoint,
    NoConsistentK,
    InconsistentOffDiagonals,
    AsymmetryDetected,
    DivisibilityViolation,
    LengthMismatch,
    ScaleExceeded,
    NoSolution,
    UnknownScheme,
    DegenerateDenominator,
    SpecViolation,
    MalformedBundle,
    InsufficientOutputs,
    DuplicateEvaluationPoint,
    ConfigError,
};

const char* errc_name(Errc c);

/// Typed error carried by every failing operation.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

} // namespace scmm
