// errors.hpp - exception taxonomy shared by all modules.
//
// Three base classes map onto the CLI exit codes:
//   ConfigError          -> 2   (bad input, violated precondition, schema problems)
//   NumericalError       -> 3   (a computation could not be completed reliably)
//   CrossValidationError -> 4   (two independent routes disagree beyond tolerance)

#pragma once

#include <stdexcept>
#include <string>

namespace qpa {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

struct CrossValidationError : std::runtime_error {
    explicit CrossValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---- ConfigError family ------------------------------------------------------

// Potential fails reality/decay validation at construction.
struct InvalidPotentialError : ConfigError {
    explicit InvalidPotentialError(const std::string& msg) : ConfigError(msg) {}
};

// Two operands were built against different frequency objects.
struct FrequencyMismatchError : ConfigError {
    explicit FrequencyMismatchError(const std::string& msg) : ConfigError(msg) {}
};

// Requested Fourier index outside the admissible recovery band.
struct OutOfBandError : ConfigError {
    explicit OutOfBandError(const std::string& msg) : ConfigError(msg) {}
};

// Rational approximation cannot certify the requested denominator range.
struct PrecisionBudgetError : ConfigError {
    long long achieved_denominator = 0;
    PrecisionBudgetError(const std::string& msg, long long den)
        : ConfigError(msg), achieved_denominator(den) {}
};

// ---- NumericalError family ---------------------------------------------------

// Adaptive ODE step size underflowed.
struct StiffnessError : NumericalError {
    double lambda = 0.0;
    StiffnessError(const std::string& msg, double lam) : NumericalError(msg), lambda(lam) {}
};

// A root bracket could not be established.
struct BracketingError : NumericalError {
    explicit BracketingError(const std::string& msg) : NumericalError(msg) {}
};

// Truncated eigenproblem too small to separate a resonant pair.
struct ResolutionError : NumericalError {
    explicit ResolutionError(const std::string& msg) : NumericalError(msg) {}
};

// Two Bloch branches are indistinguishable under the selection rule.
struct AmbiguityError : NumericalError {
    explicit AmbiguityError(const std::string& msg) : NumericalError(msg) {}
};

// Exact-arithmetic consistency check failed (should be unreachable).
struct InternalArithmeticError : NumericalError {
    explicit InternalArithmeticError(const std::string& msg) : NumericalError(msg) {}
};

// Shell scan exhausted its radius without finding a representative.
struct NotFoundError : NumericalError {
    explicit NotFoundError(const std::string& msg) : NumericalError(msg) {}
};

// Gap frame data inconsistent (nonpositive product under the square root).
struct InvalidFrameError : NumericalError {
    explicit InvalidFrameError(const std::string& msg) : NumericalError(msg) {}
};

// Supplied Dirichlet data incompatible with the gap frame.
struct InconsistentInputError : NumericalError {
    explicit InconsistentInputError(const std::string& msg) : NumericalError(msg) {}
};

} // namespace qpa
