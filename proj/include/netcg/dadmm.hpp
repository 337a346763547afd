#pragma once

// Decentralized ADMM on the consensus form
//   min Σᵢ ½ λᵢᵀŜᵢλᵢ − ŝᵢᵀλᵢ   s.t.  λᵢ = selectorᵢ λ̄.
// Local state is (λᵢ, γᵢ); the local copy λ̄ᵢ of the consensus variable is
// rebuilt every round from one neighbor exchange.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netcg/linalg.hpp"
#include "netcg/problems.hpp"
#include "netcg/simnet.hpp"
#include "netcg/sparsity.hpp"
#include "netcg/trace.hpp"

namespace netcg {

struct AdmmAgent {
    std::size_t id = 0;
    SupportSet support;
    Matrix S_hat;
    Vector s_hat;
    Vector inv_multiplicity;
    Cholesky factor;  ///< Ŝᵢ + ρI, factorized once

    Vector lambda;
    Vector lambda_bar;
    Vector gamma;
};

/// Throws NonPositiveRho for rho <= 0.
std::vector<AdmmAgent> make_admm_agents(const NetworkProblem& problem, double rho);

struct AdmmStepReport {
    CommStats comm;
    double max_primal = 0.0;  ///< maxᵢ ‖λᵢⁿ⁺¹ − λ̄ᵢⁿ⁺¹‖
    double max_dual = 0.0;    ///< maxᵢ ‖λ̄ᵢⁿ⁺¹ − λ̄ᵢⁿ‖
};

/// λᵢ ← (Ŝᵢ+ρI)⁻¹(ŝᵢ − γᵢ + ρλ̄ᵢ);  λ̄ᵢ ← Λᵢ⁻¹ Σ_{j∈N(i)} I_ij λⱼ;  γᵢ ← γᵢ + ρ(λᵢ − λ̄ᵢ).
AdmmStepReport dadmm_step(std::span<AdmmAgent> agents, const OverlapTable& overlaps, Network& net,
                          double rho);

Vector assemble_consensus(std::span<const AdmmAgent> agents, const Partition& partition);

struct AdmmOptions {
    double rho = 1.0;
    double eps_p = 1e-6;
    double eps_d = 1e-6;
    std::size_t max_iter = 1000;
    /// When set, replaces the eps_p/eps_d test with ‖Sλ̄ⁿ − s‖ < target.
    std::optional<double> residual_target;
    std::optional<Vector> lambda_bar0;
    std::optional<Vector> reference_solution;
    bool record_vectors = false;
};

struct AdmmResult {
    Vector solution;
    SolveStatus status = SolveStatus::Converged;
    ConvergenceTrace trace;   ///< residual_norm is ‖Sλ̄ⁿ − s‖ (observer side)
    std::vector<Vector> iterates;        ///< assembled λ̄ⁿ, when record_vectors
    std::vector<Vector> local_primal;    ///< agent 0's λ₀ⁿ, when record_vectors
    std::vector<double> primal_residual; ///< maxᵢ ‖λᵢⁿ − λ̄ᵢⁿ‖ per record
    std::vector<double> multiplier_norm; ///< ‖Σᵢ lift(γᵢⁿ)‖ per record

    std::size_t iterations() const noexcept { return trace.iterations(); }
};

/// Stopping decisions are taken by an observer outside the communication
/// model; the network is charged exactly one neighbor exchange per iteration.
AdmmResult dadmm_solve(const NetworkProblem& problem, const AdmmOptions& options = {});

struct SweepPoint {
    double rho = 0.0;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool hit_cap = false;
    std::optional<std::string> error;
};

/// Iterations of d-ADMM until ‖Sλ̄ⁿ − s‖ < residual_target, per ρ. Grid
/// points run independently (on `threads` workers) and come back in grid
/// order; a failing point is recorded, not rethrown.
std::vector<SweepPoint> rho_sweep(const NetworkProblem& problem, std::span<const double> rho_grid,
                                  double residual_target, std::size_t max_iter,
                                  unsigned threads = 1);

/// `points` values log-spaced on [lo, hi].
Vector log_grid(double lo, double hi, std::size_t points);

}  // namespace netcg
