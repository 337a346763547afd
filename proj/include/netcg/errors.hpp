#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace netcg {

/// Base of every error raised by the library. The CLI maps subclasses onto
/// exit codes, so keep the hierarchy shallow.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input shapes or lengths disagree.
class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Generic precondition violation that has no dedicated type.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// ---- numerical failures --------------------------------------------------

class NumericalError : public Error {
public:
    using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NotPositiveSemidefinite : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SingularMatrix : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class InvalidKappa : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// pᵀSp vanished (centralized CG) -- s is not in range(S) or S is not PSD.
class BreakdownZeroCurvature : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The globally summed σ vanished in decentralized CG.
class ZeroSigma : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonPositiveRho : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// ---- sparsity ------------------------------------------------------------

class EmptySupport : public Error {
public:
    using Error::Error;
};

class UncoveredIndex : public Error {
public:
    explicit UncoveredIndex(std::size_t index)
        : Error("global index " + std::to_string(index) + " is not owned by any agent"),
          index_(index) {}
    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class InconsistentInitialIterate : public Error {
public:
    using Error::Error;
};

// ---- network simulation --------------------------------------------------

class NotANeighbor : public Error {
public:
    NotANeighbor(std::size_t from, std::size_t to)
        : Error("node " + std::to_string(from) + " cannot address node " + std::to_string(to)),
          from_(from), to_(to) {}
    std::size_t from() const noexcept { return from_; }
    std::size_t to() const noexcept { return to_; }

private:
    std::size_t from_, to_;
};

class Disconnected : public Error {
public:
    using Error::Error;
};

// ---- problem generation --------------------------------------------------

class GenerationError : public Error {
public:
    using Error::Error;
};

class TooFewNodes : public GenerationError {
public:
    using GenerationError::GenerationError;
};

class RankDeficientMeasurement : public GenerationError {
public:
    using GenerationError::GenerationError;
};

class SingularLocalKkt : public GenerationError {
public:
    explicit SingularLocalKkt(std::size_t agent)
        : GenerationError("local KKT matrix of agent " + std::to_string(agent) + " is singular"),
          agent_(agent) {}
    std::size_t agent() const noexcept { return agent_; }

private:
    std::size_t agent_;
};

}  // namespace netcg
