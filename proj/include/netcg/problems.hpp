#pragma once

// Network-structured linear systems  (Σᵢ Sᵢ) λ = Σᵢ sᵢ  stored in compressed
// per-agent form, and the generators that produce them: communication
// topologies, the sensor-fusion reduction, and the generic KKT -> Schur
// complement path.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "netcg/linalg.hpp"
#include "netcg/simnet.hpp"
#include "netcg/sparsity.hpp"

namespace netcg {

/// One agent's data restricted to its support.
struct SparseBlock {
    SupportSet support;
    Matrix S_hat;
    Vector s_hat;
};

/// Spectral facts about S recorded alongside a generated problem.
struct SpectrumSummary {
    std::size_t rank = 0;
    std::size_t num_zero = 0;
    double kappa = 1.0;
};

struct ProblemMeta {
    std::uint64_t seed = 0;
    std::string kind;
    double noise_var = 0.0;
    std::size_t n_y = 0;
    std::optional<SpectrumSummary> spectrum;
};

class NetworkProblem {
public:
    /// Validates block shapes and symmetry; throws UncoveredIndex when some
    /// global index has no owner. When `topology` is given it must have one
    /// node per agent and connect every pair of agents with overlapping
    /// supports.
    NetworkProblem(std::size_t m, std::vector<SparseBlock> blocks,
                   std::optional<Topology> topology = std::nullopt, std::size_t n_theta = 1);

    std::size_t dim() const noexcept { return m_; }
    std::size_t agent_count() const noexcept { return blocks_.size(); }
    const std::vector<SparseBlock>& blocks() const noexcept { return blocks_; }
    const SparseBlock& block(std::size_t i) const { return blocks_.at(i); }
    const Partition& partition() const noexcept { return partition_; }
    const std::optional<Topology>& topology() const noexcept { return topology_; }
    std::size_t n_theta() const noexcept { return n_theta_; }

    /// The declared topology, or the support-overlap graph when none is set.
    Topology communication_topology() const;

    Matrix assemble_matrix() const;
    Vector assemble_rhs() const;
    /// S x computed block by block.
    Vector apply(std::span<const double> x) const;
    /// ‖S λ − s‖
    double residual_norm(std::span<const double> lambda) const;
    /// √(xᵀ S x)
    double seminorm(std::span<const double> x) const;

    std::optional<Vector> lambda_star;
    std::optional<Vector> theta_star;
    ProblemMeta meta;

private:
    std::size_t m_;
    std::vector<SparseBlock> blocks_;
    std::optional<Topology> topology_;
    std::size_t n_theta_;
    Partition partition_;
};

// ---------------------------------------------------------------------------
// Randomness. mt19937_64 output is specified by the standard; the
// distributions below are hand-rolled so that seeds reproduce bit-identically
// across standard libraries.

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    /// Uniform on [0, 1).
    double uniform();
    /// Standard normal (Box–Muller).
    double normal();
    /// Uniform on {0, …, n−1}.
    std::size_t index(std::size_t n);

private:
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

// ---------------------------------------------------------------------------
// Topologies

enum class TopologyKind { Path, Star, WeakMesh, StrongMesh, Random };

TopologyKind parse_topology_kind(std::string_view name);
std::string_view to_string(TopologyKind kind);

/// path: chain 0–1–…–(n−1).  star: center 0.
/// weak mesh: path plus ⌈n/3⌉ chords.  strong mesh: path plus every chord
/// (i, i+2) and (i, i+3).  random: random recursive spanning tree plus
/// `extra_edges` distinct edges drawn uniformly (only kind that uses seed
/// and extra_edges). Throws TooFewNodes for nodes < 2.
Topology make_topology(TopologyKind kind, std::size_t nodes, std::uint64_t seed = 0,
                       std::size_t extra_edges = 0);

/// Per-node coupling blocks of A = (incidence ⊗ I): for edge e = (i, j),
/// i < j, block row e of A_i is +I and of A_j is −I. Each A_i is
/// (|E|·n_theta) × n_theta.
std::vector<Matrix> incidence_coupling(const Topology& topology, std::size_t n_theta);

// ---------------------------------------------------------------------------
// Sensor fusion

struct SensorNetwork {
    Topology topology;
    std::size_t n_theta = 1;
    std::size_t n_y = 1;
    std::vector<Matrix> M;  ///< n_y × n_theta per node
    std::vector<Vector> y;
    Vector theta_true;
    double noise_var = 0.0;
    std::vector<Matrix> A;  ///< incidence_coupling(topology, n_theta)
};

/// Random instance: M entries uniform on [0,1] (resampled until full column
/// rank), θ* uniform on [0,1], y_i = M_i θ* + N(0, noise_var).
SensorNetwork make_sensor_network(const Topology& topology, std::size_t n_theta,
                                  std::size_t n_y, double noise_var, std::uint64_t seed);

/// Schur-complement system in the multipliers of the consensus constraints:
/// Sᵢ = Aᵢ(MᵢᵀMᵢ)⁻¹Aᵢᵀ, sᵢ = −Aᵢ(MᵢᵀMᵢ)⁻¹Mᵢᵀyᵢ, compressed to the
/// coordinates of the edges incident to node i.
NetworkProblem sensor_problem_from(const SensorNetwork& net);

std::pair<SensorNetwork, NetworkProblem> sensor_problem(const Topology& topology,
                                                        std::size_t n_theta, std::size_t n_y,
                                                        double noise_var, std::uint64_t seed);

/// θᵢ = (MᵢᵀMᵢ)⁻¹(Mᵢᵀyᵢ + Aᵢᵀλ̄) for every node.
std::vector<Vector> recover_estimates(const SensorNetwork& net, std::span<const double> lambda);

/// Pooled least-squares estimate argmin Σ ½‖yᵢ − Mᵢθ‖².
Vector centralized_estimate(const SensorNetwork& net);

// ---------------------------------------------------------------------------
// KKT -> Schur complement

/// Local quadratic model of one agent: Hessian B, equality-constraint
/// Jacobian G (may have zero rows), top block g of the right-hand side
/// h = (g, 0), and coupling A (m × n_i).
struct QpAgentBlock {
    Matrix B;
    Matrix G;
    Vector g;
    Matrix A;
};

/// KKT system  [H Aᵀ; A D] (p, λ) = (−h, d)  with H = blkdiag([Bᵢ Gᵢᵀ; Gᵢ 0]).
/// D must be diagonal (an empty matrix means zero); an empty d means zero.
struct QpBlocks {
    std::vector<QpAgentBlock> agents;
    Matrix D;
    Vector d;
    std::optional<Topology> topology;
};

/// Eliminates p:  (Σ Āᵢ Hᵢ⁻¹ Āᵢᵀ − D) λ = −d − Σ Āᵢ Hᵢ⁻¹ hᵢ  with Āᵢ = [Aᵢ 0].
/// Supports are the nonzero rows of Aᵢ; D and d are split across the owners
/// of each index with the inverse multiplicity weights. Throws
/// SingularLocalKkt(i) when Hᵢ is singular.
NetworkProblem schur_from_kkt(const QpBlocks& blocks);

/// Sensor fusion written as the generic KKT model. The primal unknown of
/// this encoding is p = −θ, which makes schur_from_kkt reproduce
/// sensor_problem_from exactly.
QpBlocks sensor_qp_blocks(const SensorNetwork& net);

// ---------------------------------------------------------------------------
// Analysis helpers

/// ‖(I − QQᵀ) s‖ <= tol·max(1, ‖s‖) with Q an orthonormal range basis of S.
bool verify_range(const NetworkProblem& problem, double tol = 1e-8);

/// Minimum-norm solution of S λ = s via the reduced system QᵀSQ.
Vector reference_solution(const NetworkProblem& problem);

}  // namespace netcg
