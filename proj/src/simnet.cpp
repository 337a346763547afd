#include "netcg/simnet.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <set>
#include <string>

#include "netcg/errors.hpp"

namespace netcg {

namespace {

constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

}  // namespace

Topology::Topology(std::size_t node_count, std::vector<Edge> edges)
    : node_count_(node_count), adjacency_(node_count) {
    if (node_count == 0) throw InvalidArgument("Topology: no nodes");
    std::set<Edge> seen;
    edges_.reserve(edges.size());
    for (auto [a, b] : edges) {
        if (a >= node_count || b >= node_count) {
            throw InvalidArgument("Topology: edge (" + std::to_string(a) + "," + std::to_string(b) +
                                  ") out of range");
        }
        if (a == b) throw InvalidArgument("Topology: self-loop at " + std::to_string(a));
        const Edge e{std::min(a, b), std::max(a, b)};
        if (!seen.insert(e).second) {
            throw InvalidArgument("Topology: duplicate edge (" + std::to_string(e.first) + "," +
                                  std::to_string(e.second) + ")");
        }
        edges_.push_back(e);
        adjacency_[e.first].push_back(e.second);
        adjacency_[e.second].push_back(e.first);
    }
    for (auto& adj : adjacency_) std::sort(adj.begin(), adj.end());

    std::vector<bool> reached(node_count, false);
    std::deque<std::size_t> queue{0};
    reached[0] = true;
    std::size_t count = 1;
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w : adjacency_[v]) {
            if (!reached[w]) {
                reached[w] = true;
                ++count;
                queue.push_back(w);
            }
        }
    }
    if (count != node_count) {
        throw Disconnected("Topology: " + std::to_string(node_count - count) +
                           " node(s) unreachable from node 0");
    }
}

bool Topology::adjacent(std::size_t a, std::size_t b) const {
    const auto& adj = adjacency_.at(a);
    return std::binary_search(adj.begin(), adj.end(), b);
}

CommStats operator-(const CommStats& a, const CommStats& b) {
    return {a.neighbor_exchanges - b.neighbor_exchanges,
            a.neighbor_messages - b.neighbor_messages,
            a.neighbor_scalars_sent - b.neighbor_scalars_sent,
            a.global_sum_invocations - b.global_sum_invocations, a.rounds - b.rounds};
}

Network::Network(Topology topology)
    : topology_(std::move(topology)),
      parent_(topology_.node_count(), kUnvisited),
      children_(topology_.node_count()) {
    std::vector<std::size_t> level(topology_.node_count(), 0);
    std::deque<std::size_t> queue{0};
    parent_[0] = 0;
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop_front();
        bfs_order_.push_back(v);
        for (std::size_t w : topology_.neighbors(v)) {
            if (parent_[w] != kUnvisited) continue;
            parent_[w] = v;
            level[w] = level[v] + 1;
            depth_ = std::max(depth_, level[w]);
            children_[v].push_back(w);
            queue.push_back(w);
        }
    }
    // Topology already guarantees connectivity.
}

Mailbox Network::neighbor_exchange(const Mailbox& outgoing) {
    const std::size_t n = node_count();
    if (outgoing.size() != n) throw DimensionMismatch("neighbor_exchange: one outbox per node");
    Mailbox incoming(n);
    for (std::size_t from = 0; from < n; ++from) {
        for (const auto& [to, payload] : outgoing[from]) {
            if (to == from || to >= n || !topology_.adjacent(from, to)) throw NotANeighbor(from, to);
            incoming[to].emplace(from, payload);
            ++stats_.neighbor_messages;
            stats_.neighbor_scalars_sent += payload.size();
        }
    }
    ++stats_.neighbor_exchanges;
    ++stats_.rounds;
    return incoming;
}

Vector Network::global_sum(std::span<const Vector> locals) {
    const std::size_t n = node_count();
    if (locals.size() != n) throw DimensionMismatch("global_sum: one tuple per node");
    const std::size_t arity = locals.front().size();
    for (const auto& t : locals)
        if (t.size() != arity) throw DimensionMismatch("global_sum: tuples differ in arity");

    // Reduce: every node adds its children's partial sums (ascending id) to
    // its own value; process nodes in reverse BFS order so children finish first.
    std::vector<Vector> partial(locals.begin(), locals.end());
    for (auto it = bfs_order_.rbegin(); it != bfs_order_.rend(); ++it) {
        const std::size_t v = *it;
        Vector acc = locals[v];
        for (std::size_t c : children_[v])
            for (std::size_t k = 0; k < arity; ++k) acc[k] += partial[c][k];
        partial[v] = std::move(acc);
    }
    ++stats_.global_sum_invocations;
    stats_.rounds += 2 * depth_;
    // Broadcast is a copy of the root value to every node.
    return partial[0];
}

double Network::global_sum(std::span<const double> locals) {
    std::vector<Vector> tuples;
    tuples.reserve(locals.size());
    for (double v : locals) tuples.push_back(Vector{v});
    return global_sum(std::span<const Vector>(tuples)).front();
}

}  // namespace netcg
