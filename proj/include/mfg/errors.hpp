#pragma once

#include <stdexcept>
#include <string>

namespace mfg {

/// Caller passed inconsistent inputs (size/grid mismatch, unknown name, bad flag).
struct InputError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Input violates a mathematical precondition (negative density, odd-kernel potential).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A linear solve failed to meet its residual contract.
struct SolverFailure : std::runtime_error {
    SolverFailure(const std::string& what, double residual, int level = -1)
        : std::runtime_error(what), residual(residual), level(level) {}
    double residual; ///< final ||Ax-b||_inf
    int level;       ///< time level where the solve failed, -1 if not applicable
};

/// An internal invariant that should be unreachable was violated.
struct InvariantViolation : std::logic_error {
    using std::logic_error::logic_error;
};

} // namespace mfg
