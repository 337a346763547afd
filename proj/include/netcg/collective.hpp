#pragma once

#include <span>
#include <vector>

#include "netcg/linalg.hpp"
#include "netcg/simnet.hpp"
#include "netcg/sparsity.hpp"

namespace netcg {

/// One neighbor-exchange round computing, for every agent i,
///   Σ_{j ∈ N(i)} (selector_i · selector_jᵀ) local[j]
/// Agent j ships to neighbor i only the entries on their common indices;
/// the agent's own term is added locally. Contributions are accumulated in
/// ascending neighbor id.
std::vector<Vector> neighbor_overlap_sum(std::span<const Vector> local, const OverlapTable& overlaps,
                                         Network& net);

}  // namespace netcg
