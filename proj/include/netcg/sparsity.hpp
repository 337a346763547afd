#pragma once

// Support sets and the index calculus built on them. Projection matrices are
// never materialized: a support set is the sorted list of global indices an
// agent touches, and every "multiply by the 0/1 selector" is a gather or a
// scatter over that list.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "netcg/linalg.hpp"

namespace netcg {

class SupportSet {
public:
    SupportSet() = default;
    /// `indices` must be strictly increasing and < global_dim.
    SupportSet(std::size_t global_dim, std::vector<std::size_t> indices);

    std::size_t global_dim() const noexcept { return global_dim_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    const std::vector<std::size_t>& indices() const noexcept { return indices_; }
    std::size_t operator[](std::size_t k) const { return indices_[k]; }
    bool contains(std::size_t global) const;

    friend bool operator==(const SupportSet&, const SupportSet&) = default;

private:
    std::size_t global_dim_ = 0;
    std::vector<std::size_t> indices_;
};

/// Indices c where row c of `s_i` has an entry with |.| > tol or |rhs_i[c]| > tol.
/// Throws EmptySupport when nothing qualifies.
SupportSet support_of(const Matrix& s_i, std::span<const double> rhs_i, double tol = 0.0);

/// Gather / scatter between global and compressed coordinates.
class Projector {
public:
    explicit Projector(SupportSet support) : support_(std::move(support)) {}

    const SupportSet& support() const noexcept { return support_; }

    /// x (length m) -> x restricted to the support.
    Vector project(std::span<const double> x) const;
    /// Compressed vector -> length-m vector with zeros off the support.
    Vector lift(std::span<const double> xc) const;
    /// out += lift(xc), without allocating.
    void lift_add(std::span<const double> xc, std::span<double> out) const;
    /// Compress a dense m x m matrix to its support rows and columns.
    Matrix compress(const Matrix& full) const;
    /// Scatter a compressed |C| x |C| matrix into m x m.
    Matrix expand(const Matrix& compressed) const;

private:
    SupportSet support_;
};

struct Multiplicity {
    /// Number of agents owning each global index (diagonal of the global
    /// multiplicity matrix).
    std::vector<int> global_diag;
    /// Per agent, the slice of global_diag over its support.
    std::vector<std::vector<int>> per_agent;

    /// Elementwise reciprocal of agent i's slice (its inverse weight).
    Vector inverse_weights(std::size_t agent) const;
};

/// Throws UncoveredIndex when a global index has no owner.
Multiplicity multiplicity(std::span<const SupportSet> supports);

/// Shared coordinates of two agents as (position in i, position in j) pairs,
/// ordered by global index.
struct OverlapMap {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    bool empty() const noexcept { return pairs.empty(); }
};

struct Neighbor {
    std::size_t agent;
    OverlapMap overlap;
};

/// Neighbor lists (agents with a common index, the agent itself included)
/// plus the overlap maps that realize the selector products between them.
class OverlapTable {
public:
    OverlapTable() = default;
    explicit OverlapTable(std::vector<std::vector<Neighbor>> neighbors)
        : neighbors_(std::move(neighbors)) {}

    std::size_t agent_count() const noexcept { return neighbors_.size(); }
    /// Sorted by agent id; always contains `agent` itself.
    const std::vector<Neighbor>& neighbors(std::size_t agent) const { return neighbors_[agent]; }
    std::vector<std::size_t> neighbor_ids(std::size_t agent) const;
    /// Empty map when the agents share nothing.
    const OverlapMap& between(std::size_t i, std::size_t j) const;

    /// out_i += (selector_i · selector_jᵀ) x_j
    void accumulate(std::size_t i, std::size_t j, std::span<const double> x_j,
                    std::span<double> out_i) const;

private:
    std::vector<std::vector<Neighbor>> neighbors_;
};

OverlapTable overlap(std::span<const SupportSet> supports);

/// Everything derived from a list of supports, computed once per problem.
struct Partition {
    std::vector<SupportSet> supports;
    Multiplicity mult;
    OverlapTable overlaps;

    explicit Partition(std::vector<SupportSet> supports_in);
    std::size_t agent_count() const noexcept { return supports.size(); }
    std::size_t global_dim() const noexcept;

    /// Lowest-id owner of every global index and the local position there.
    std::vector<std::pair<std::size_t, std::size_t>> first_owner;
};

}  // namespace netcg
