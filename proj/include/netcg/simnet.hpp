#pragma once

// Synchronous, lossless message-passing simulator. Two primitives exist:
// a neighbor-to-neighbor exchange of vectors (one round) and an exact
// network-wide sum of scalar tuples, realized as reduce-then-broadcast along
// a breadth-first spanning tree rooted at node 0.

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "netcg/linalg.hpp"

namespace netcg {

using Edge = std::pair<std::size_t, std::size_t>;

/// Connected undirected simple graph. Edges are stored as (min, max) in the
/// order given.
class Topology {
public:
    Topology() = default;
    /// Throws InvalidArgument on self-loops, duplicates or out-of-range nodes,
    /// Disconnected when some node is unreachable from node 0.
    Topology(std::size_t node_count, std::vector<Edge> edges);

    std::size_t node_count() const noexcept { return node_count_; }
    std::size_t edge_count() const noexcept { return edges_.size(); }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    /// Ascending node ids.
    const std::vector<std::size_t>& neighbors(std::size_t node) const { return adjacency_[node]; }
    bool adjacent(std::size_t a, std::size_t b) const;

private:
    std::size_t node_count_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::size_t>> adjacency_;
};

struct CommStats {
    std::size_t neighbor_exchanges = 0;     ///< invocations of neighbor_exchange
    std::size_t neighbor_messages = 0;      ///< point-to-point vector messages
    std::size_t neighbor_scalars_sent = 0;  ///< total payload volume
    std::size_t global_sum_invocations = 0;
    std::size_t rounds = 0;

    friend CommStats operator-(const CommStats& a, const CommStats& b);
    friend bool operator==(const CommStats&, const CommStats&) = default;
};

/// Per node: destination (or source, on delivery) -> payload.
using Mailbox = std::vector<std::map<std::size_t, Vector>>;

class Network {
public:
    explicit Network(Topology topology);

    const Topology& topology() const noexcept { return topology_; }
    std::size_t node_count() const noexcept { return topology_.node_count(); }
    const CommStats& stats() const noexcept { return stats_; }

    /// outgoing[i][j] is what node i sends to neighbor j. Returns incoming
    /// with incoming[j][i] == outgoing[i][j]. Costs one round.
    /// Throws NotANeighbor for self-addressed or non-adjacent messages.
    Mailbox neighbor_exchange(const Mailbox& outgoing);

    /// Component-wise sum of every node's tuple, identical at every node.
    /// Costs 2 * depth rounds.
    Vector global_sum(std::span<const Vector> locals);
    /// Convenience for a single scalar per node.
    double global_sum(std::span<const double> locals);

    std::size_t tree_depth() const noexcept { return depth_; }
    /// BFS parent (node 0 is its own parent).
    const std::vector<std::size_t>& tree_parent() const noexcept { return parent_; }

private:
    Topology topology_;
    CommStats stats_;
    std::vector<std::size_t> parent_;
    std::vector<std::vector<std::size_t>> children_;
    std::vector<std::size_t> bfs_order_;
    std::size_t depth_ = 0;
};

}  // namespace netcg
