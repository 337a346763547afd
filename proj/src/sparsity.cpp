#include "netcg/sparsity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "netcg/errors.hpp"

namespace netcg {

SupportSet::SupportSet(std::size_t global_dim, std::vector<std::size_t> indices)
    : global_dim_(global_dim), indices_(std::move(indices)) {
    for (std::size_t k = 0; k < indices_.size(); ++k) {
        if (indices_[k] >= global_dim_) {
            throw InvalidArgument("SupportSet: index " + std::to_string(indices_[k]) +
                                  " out of range " + std::to_string(global_dim_));
        }
        if (k > 0 && indices_[k] <= indices_[k - 1]) {
            throw InvalidArgument("SupportSet: indices must be strictly increasing");
        }
    }
}

bool SupportSet::contains(std::size_t global) const {
    return std::binary_search(indices_.begin(), indices_.end(), global);
}

SupportSet support_of(const Matrix& s_i, std::span<const double> rhs_i, double tol) {
    if (!s_i.square() || s_i.rows() != rhs_i.size()) {
        throw DimensionMismatch("support_of: block and right-hand side disagree");
    }
    std::vector<std::size_t> idx;
    for (std::size_t c = 0; c < s_i.rows(); ++c) {
        bool hit = std::abs(rhs_i[c]) > tol;
        for (std::size_t j = 0; j < s_i.cols() && !hit; ++j) hit = std::abs(s_i(c, j)) > tol;
        if (hit) idx.push_back(c);
    }
    if (idx.empty()) throw EmptySupport("support_of: block is identically zero");
    return SupportSet(s_i.rows(), std::move(idx));
}

// ---------------------------------------------------------------------------

Vector Projector::project(std::span<const double> x) const {
    if (x.size() != support_.global_dim()) throw DimensionMismatch("project: wrong length");
    Vector out(support_.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = x[support_[k]];
    return out;
}

Vector Projector::lift(std::span<const double> xc) const {
    Vector out(support_.global_dim(), 0.0);
    lift_add(xc, out);
    return out;
}

void Projector::lift_add(std::span<const double> xc, std::span<double> out) const {
    if (xc.size() != support_.size() || out.size() != support_.global_dim()) {
        throw DimensionMismatch("lift: wrong length");
    }
    for (std::size_t k = 0; k < xc.size(); ++k) out[support_[k]] += xc[k];
}

Matrix Projector::compress(const Matrix& full) const {
    if (full.rows() != support_.global_dim() || !full.square()) {
        throw DimensionMismatch("compress: wrong shape");
    }
    const std::size_t n = support_.size();
    Matrix out(n, n);
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) out(a, b) = full(support_[a], support_[b]);
    return out;
}

Matrix Projector::expand(const Matrix& compressed) const {
    const std::size_t n = support_.size();
    if (compressed.rows() != n || compressed.cols() != n) {
        throw DimensionMismatch("expand: wrong shape");
    }
    Matrix out(support_.global_dim(), support_.global_dim());
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) out(support_[a], support_[b]) = compressed(a, b);
    return out;
}

// ---------------------------------------------------------------------------

Vector Multiplicity::inverse_weights(std::size_t agent) const {
    const auto& slice = per_agent.at(agent);
    Vector w(slice.size());
    for (std::size_t k = 0; k < slice.size(); ++k) w[k] = 1.0 / slice[k];
    return w;
}

Multiplicity multiplicity(std::span<const SupportSet> supports) {
    if (supports.empty()) throw InvalidArgument("multiplicity: no supports");
    const std::size_t m = supports.front().global_dim();
    Multiplicity out;
    out.global_diag.assign(m, 0);
    for (const auto& sup : supports) {
        if (sup.global_dim() != m) throw DimensionMismatch("multiplicity: supports disagree on m");
        for (std::size_t c : sup.indices()) ++out.global_diag[c];
    }
    for (std::size_t c = 0; c < m; ++c)
        if (out.global_diag[c] == 0) throw UncoveredIndex(c);

    out.per_agent.reserve(supports.size());
    for (const auto& sup : supports) {
        std::vector<int> slice(sup.size());
        for (std::size_t k = 0; k < sup.size(); ++k) slice[k] = out.global_diag[sup[k]];
        out.per_agent.push_back(std::move(slice));
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> OverlapTable::neighbor_ids(std::size_t agent) const {
    std::vector<std::size_t> ids;
    for (const auto& nb : neighbors_.at(agent)) ids.push_back(nb.agent);
    return ids;
}

const OverlapMap& OverlapTable::between(std::size_t i, std::size_t j) const {
    static const OverlapMap none{};
    const auto& list = neighbors_.at(i);
    auto it = std::lower_bound(list.begin(), list.end(), j,
                               [](const Neighbor& nb, std::size_t id) { return nb.agent < id; });
    if (it == list.end() || it->agent != j) return none;
    return it->overlap;
}

void OverlapTable::accumulate(std::size_t i, std::size_t j, std::span<const double> x_j,
                              std::span<double> out_i) const {
    for (const auto& [pos_i, pos_j] : between(i, j).pairs) out_i[pos_i] += x_j[pos_j];
}

OverlapTable overlap(std::span<const SupportSet> supports) {
    const std::size_t agents = supports.size();
    const std::size_t m = agents == 0 ? 0 : supports.front().global_dim();

    // owners[c] = (agent, local position), agents ascending.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> owners(m);
    for (std::size_t a = 0; a < agents; ++a) {
        if (supports[a].global_dim() != m) throw DimensionMismatch("overlap: supports disagree on m");
        for (std::size_t k = 0; k < supports[a].size(); ++k) owners[supports[a][k]].emplace_back(a, k);
    }

    std::vector<std::vector<Neighbor>> table(agents);
    for (std::size_t i = 0; i < agents; ++i) {
        auto& list = table[i];
        for (std::size_t k = 0; k < supports[i].size(); ++k) {
            for (const auto& [j, pos_j] : owners[supports[i][k]]) {
                auto it = std::lower_bound(
                    list.begin(), list.end(), j,
                    [](const Neighbor& nb, std::size_t id) { return nb.agent < id; });
                if (it == list.end() || it->agent != j) it = list.insert(it, Neighbor{j, {}});
                it->overlap.pairs.emplace_back(k, pos_j);
            }
        }
    }
    return OverlapTable(std::move(table));
}

// ---------------------------------------------------------------------------

Partition::Partition(std::vector<SupportSet> supports_in)
    : supports(std::move(supports_in)), mult(multiplicity(supports)), overlaps(overlap(supports)) {
    first_owner.assign(global_dim(), {std::numeric_limits<std::size_t>::max(), 0});
    for (std::size_t a = supports.size(); a-- > 0;)
        for (std::size_t k = 0; k < supports[a].size(); ++k) first_owner[supports[a][k]] = {a, k};
}

std::size_t Partition::global_dim() const noexcept {
    return supports.empty() ? 0 : supports.front().global_dim();
}

}  // namespace netcg
