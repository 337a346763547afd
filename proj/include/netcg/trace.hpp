#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "netcg/simnet.hpp"

namespace netcg {

enum class SolveStatus { Converged, MaxIterations };

struct IterationRecord {
    std::size_t iter = 0;
    double residual_norm = 0.0;
    std::optional<double> seminorm_error;  ///< ‖λ̄ⁿ − λ̄*‖_S when λ̄* is known
    /// Rate bound in the same units as seminorm_error: record n >= 1 holds
    /// √(2cⁿ⁻¹)·‖λ̄⁰ − λ̄*‖_S with c the contraction factor; record 0 holds ‖λ̄⁰ − λ̄*‖_S.
    std::optional<double> bound;
    double alpha = 0.0;
    double beta = 0.0;
    CommStats comm;  ///< cumulative
};

/// One record per iteration plus the initial state (record 0).
struct ConvergenceTrace {
    std::string method;
    std::vector<IterationRecord> records;

    std::size_t iterations() const noexcept { return records.empty() ? 0 : records.size() - 1; }
};

}  // namespace netcg
