#pragma once

// Decentralized conjugate gradients. Each agent keeps its compressed block
// (Ŝᵢ, ŝᵢ) and four local vectors over its support (λᵢ, rᵢ, pᵢ, uᵢ = Ŝᵢpᵢ).
// Per iteration the network spends two scalar global sums (σ, then η) and one
// neighbor exchange (of uᵢ); everything else is local. In exact arithmetic
// the iterates coincide with centralized CG restricted to each support.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "netcg/linalg.hpp"
#include "netcg/problems.hpp"
#include "netcg/simnet.hpp"
#include "netcg/sparsity.hpp"
#include "netcg/trace.hpp"

namespace netcg {

struct DcgAgent {
    std::size_t id = 0;
    SupportSet support;
    Matrix S_hat;
    Vector s_hat;
    Vector inv_multiplicity;  ///< diagonal of Λᵢ⁻¹

    Vector lambda;
    Vector r;
    Vector p;
    Vector u;
    double eta_local = 0.0;    ///< rᵢᵀΛᵢ⁻¹rᵢ
    double sigma_local = 0.0;  ///< pᵢᵀŜᵢpᵢ
    double eta_global = 0.0;
    double sigma_global = 0.0;
};

std::vector<DcgAgent> make_dcg_agents(const NetworkProblem& problem);

/// Residual initialization from per-agent starting points (an empty span
/// means λᵢ⁰ = 0). One neighbor exchange of ŝⱼ − Ŝⱼλⱼ⁰ and one global sum
/// of ηᵢ⁰. Throws InconsistentInitialIterate when two owners of an index
/// disagree by more than 1e-12.
void dcg_init(std::span<DcgAgent> agents, const OverlapTable& overlaps, Network& net,
              std::span<const Vector> lambda0 = {});

/// One iteration, steps in this order:
///   σ = Σσᵢ                                   (global sum)
///   rᵢ ← rᵢ − (η/σ) Σ_{j∈N(i)} I_ij uⱼ          (neighbor exchange)
///   ηᵢ = rᵢᵀΛᵢ⁻¹rᵢ,  λᵢ ← λᵢ + (η/σ) pᵢ        (local)
///   η⁺ = Σηᵢ                                  (global sum)
///   pᵢ ← rᵢ + (η⁺/η) pᵢ,  uᵢ = Ŝᵢpᵢ,  σᵢ = pᵢᵀuᵢ (local)
/// Throws ZeroSigma when σ <= 1e-14·η. Returns the communication spent.
CommStats dcg_step(std::span<DcgAgent> agents, const OverlapTable& overlaps, Network& net);

/// max |λᵢ[c] − λⱼ[c]| over all shared indices.
double consensus_residual(std::span<const DcgAgent> agents, const OverlapTable& overlaps);

/// Global vectors read off the lowest-id owner of each index.
Vector assemble_lambda(std::span<const DcgAgent> agents, const Partition& partition);
Vector assemble_residual(std::span<const DcgAgent> agents, const Partition& partition);
Vector assemble_direction(std::span<const DcgAgent> agents, const Partition& partition);

struct DcgOptions {
    double tol = 1e-10;  ///< stop once √η <= tol (η = ‖r‖², already globally known)
    std::size_t max_iter = 1000;
    std::optional<Vector> lambda0;  ///< global start, projected onto each support
    std::optional<Vector> reference_solution;
    std::optional<double> kappa;
    bool record_vectors = false;
};

struct DcgResult {
    std::vector<Vector> local_solutions;
    Vector solution;
    SolveStatus status = SolveStatus::Converged;
    ConvergenceTrace trace;
    std::vector<Vector> iterates;  ///< assembled, when record_vectors
    std::vector<Vector> residuals;
    std::vector<Vector> directions;
    std::vector<double> consensus;  ///< consensus_residual per record

    std::size_t iterations() const noexcept { return trace.iterations(); }
};

DcgResult dcg_solve(const NetworkProblem& problem, const DcgOptions& options = {});

}  // namespace netcg
