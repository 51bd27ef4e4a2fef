#pragma once
#include <stdexcept>
#include <string>

namespace crf {

// Base class for all library failures. Subclasses identify the failure mode so
// callers (and the CLI exit-code mapping) never have to parse messages.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A parameter or argument lies outside its physical or mathematical domain.
struct DomainError : Error {
    using Error::Error;
};

// Ensemble grid construction failed (degenerate or unnormalizable grid).
struct GridError : Error {
    using Error::Error;
};

// Adaptive integrator gave up: step size underflowed or the step budget was
// exhausted. Carries the time and state norm at the point of failure.
struct StiffnessError : Error {
    double t;
    double state_norm;
    StiffnessError(const std::string& msg, double t_, double norm_)
        : Error(msg), t(t_), state_norm(norm_) {}
};

// Trajectory window contains too few extrema to measure an oscillation.
struct OscillationError : Error {
    using Error::Error;
};

// Long-time drift model hit its inversion singularity (normal phase reached).
struct SingularDriftError : Error {
    using Error::Error;
};

// Fock-space truncation inadequate: the top photon level holds too much
// steady-state population for the result to be trusted.
struct TruncationError : Error {
    double top_population;
    TruncationError(const std::string& msg, double pop)
        : Error(msg), top_population(pop) {}
};

// A linear solve is too ill-conditioned to trust.
struct IllConditionedError : Error {
    double condition;
    IllConditionedError(const std::string& msg, double cond)
        : Error(msg), condition(cond) {}
};

// Liouvillian null space is not one-dimensional (multiple steady states).
struct DegenerateNullSpaceError : Error {
    using Error::Error;
};

// Requested operator or superoperator dimension exceeds the desk-scale cap.
struct DimensionError : Error {
    using Error::Error;
};

// An internal refinement loop (quadrature doubling, ...) failed to converge.
struct ConvergenceError : Error {
    using Error::Error;
};

// Malformed or unusable input/output document (JSON manifest, CSV, file).
struct IoError : Error {
    using Error::Error;
};

// Invalid experiment specification (unknown axis, empty value list, ...).
struct SpecError : Error {
    using Error::Error;
};

} // namespace crf
