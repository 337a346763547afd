#pragma once

// Centralized conjugate gradients for symmetric positive-semidefinite systems
// with s in range(S), plus the analysis helpers around its convergence
// guarantee (rate bound, spectrum, finite-termination budget).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "netcg/linalg.hpp"
#include "netcg/trace.hpp"

namespace netcg {

struct CgOptions {
    double tol = 1e-10;  ///< stop once ‖rⁿ‖ <= tol
    std::size_t max_iter = 1000;
    /// When set, the trace carries ‖λ̄ⁿ − λ̄*‖_S.
    std::optional<Vector> reference_solution;
    /// When set together with reference_solution, the trace carries the rate bound.
    std::optional<double> kappa;
    /// Keep every iterate, residual and direction (for equivalence checks).
    bool record_vectors = false;
};

struct CgResult {
    Vector solution;
    SolveStatus status = SolveStatus::Converged;
    ConvergenceTrace trace;
    std::vector<Vector> iterates;    ///< λ̄⁰ … λ̄ᴺ when record_vectors
    std::vector<Vector> residuals;   ///< r⁰ … rᴺ
    std::vector<Vector> directions;  ///< p⁰ … pᴺ

    std::size_t iterations() const noexcept { return trace.iterations(); }
};

/// What the recursion needs to know about S. Only `apply` is required; the
/// other hooks default to plain dense reductions and exist so a caller can
/// reproduce a specific floating-point summation order.
struct CgOperator {
    std::size_t dim = 0;
    std::function<Vector(std::span<const double>)> apply;
    /// (s, λ⁰) ↦ s − Sλ⁰
    std::function<Vector(std::span<const double>, std::span<const double>)> initial_residual;
    /// r ↦ rᵀr
    std::function<double(std::span<const double>)> residual_sq;
    /// (p, Sp) ↦ pᵀSp
    std::function<double(std::span<const double>, std::span<const double>)> curvature;
    /// x ↦ ‖x‖_S, used for trace annotations only
    std::function<double(std::span<const double>)> seminorm;
};

CgOperator dense_operator(const Matrix& s);

/// Plain CG recursion: α = rᵀr / pᵀSp, no restarts. Returns the last iterate
/// with status MaxIterations when the budget runs out. Throws
/// BreakdownZeroCurvature when pᵀSp <= 1e-14·‖p‖².
CgResult cg_solve(const Matrix& s, std::span<const double> rhs, std::span<const double> lambda0,
                  const CgOptions& options = {});
CgResult cg_solve(const CgOperator& op, std::span<const double> rhs, std::span<const double> lambda0,
                  const CgOptions& options = {});

/// 2·((√κ−1)/(√κ+1))ⁿ · initial_sq_error. Throws InvalidKappa for κ < 1.
double convergence_bound(double kappa, double initial_sq_error, std::size_t n);

/// (√κ−1)/(√κ+1)
double contraction_factor(double kappa);

SpectralStats spectral_stats_of(const Matrix& s, std::optional<double> zero_tol = std::nullopt);

}  // namespace netcg
