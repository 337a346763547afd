#include "netcg/collective.hpp"

#include "netcg/errors.hpp"

namespace netcg {

std::vector<Vector> neighbor_overlap_sum(std::span<const Vector> local, const OverlapTable& overlaps,
                                         Network& net) {
    const std::size_t agents = overlaps.agent_count();
    if (local.size() != agents || net.node_count() != agents) {
        throw DimensionMismatch("neighbor_overlap_sum: agent counts disagree");
    }

    Mailbox outgoing(agents);
    for (std::size_t j = 0; j < agents; ++j) {
        for (const auto& nb : overlaps.neighbors(j)) {
            if (nb.agent == j) continue;
            Vector payload;
            payload.reserve(nb.overlap.pairs.size());
            for (const auto& [pos_j, pos_i] : nb.overlap.pairs) payload.push_back(local[j][pos_j]);
            outgoing[j].emplace(nb.agent, std::move(payload));
        }
    }
    const Mailbox incoming = net.neighbor_exchange(outgoing);

    std::vector<Vector> sums(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        Vector acc(local[i].size(), 0.0);
        for (const auto& nb : overlaps.neighbors(i)) {
            if (nb.agent == i) {
                for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += local[i][k];
                continue;
            }
            const Vector& payload = incoming[i].at(nb.agent);
            for (std::size_t k = 0; k < nb.overlap.pairs.size(); ++k)
                acc[nb.overlap.pairs[k].first] += payload[k];
        }
        sums[i] = std::move(acc);
    }
    return sums;
}

}  // namespace netcg
