#pragma once

// Reference computations for the test suites. They deliberately avoid the
// code paths they check: selectors are materialized as dense 0/1 matrices,
// kernels come from graph cycles, and linear solves use plain Gaussian
// elimination.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "netcg/cg.hpp"
#include "netcg/linalg.hpp"
#include "netcg/problems.hpp"
#include "netcg/simnet.hpp"
#include "netcg/sparsity.hpp"

namespace oracle {

using netcg::Matrix;
using netcg::Vector;

/// The |C| x m matrix whose rows are the unit vectors of the support.
inline Matrix selector(const netcg::SupportSet& support) {
    Matrix sel(support.size(), support.global_dim(), 0.0);
    for (std::size_t k = 0; k < support.size(); ++k) sel(k, support[k]) = 1.0;
    return sel;
}

inline Matrix dense_product(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("dense_product: shapes");
    Matrix c(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k)
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += a(i, k) * b(k, j);
    return c;
}

inline Vector dense_apply(const Matrix& a, const Vector& x) {
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) y[i] += a(i, k) * x[k];
    return y;
}

inline Matrix transposed(const Matrix& a) {
    Matrix t(a.cols(), a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
    return t;
}

inline double frobenius_distance(const Matrix& a, const Matrix& b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) sum += (a(i, j) - b(i, j)) * (a(i, j) - b(i, j));
    return std::sqrt(sum);
}

inline double norm(const Vector& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double distance(const Vector& a, const Vector& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(s);
}

/// ‖a − b‖ / max(1, ‖b‖)
inline double relative_distance(const Vector& a, const Vector& b) {
    return distance(a, b) / std::max(1.0, norm(b));
}

/// S = Σ I_iᵀ Ŝ_i I_i and s = Σ I_iᵀ ŝ_i built from dense selectors.
inline Matrix assemble_dense(const netcg::NetworkProblem& problem) {
    Matrix s(problem.dim(), problem.dim(), 0.0);
    for (const auto& b : problem.blocks()) {
        const Matrix sel = selector(b.support);
        const Matrix part = dense_product(dense_product(transposed(sel), b.S_hat), sel);
        for (std::size_t i = 0; i < s.rows(); ++i)
            for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) += part(i, j);
    }
    return s;
}

inline Vector assemble_dense_rhs(const netcg::NetworkProblem& problem) {
    Vector s(problem.dim(), 0.0);
    for (const auto& b : problem.blocks()) {
        const Vector part = dense_apply(transposed(selector(b.support)), b.s_hat);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += part[k];
    }
    return s;
}

/// Gaussian elimination with partial pivoting; throws on a singular matrix.
inline Vector gauss_solve(Matrix a, Vector b) {
    const std::size_t n = a.rows();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a(r, col)) > std::abs(a(piv, col))) piv = r;
        if (a(piv, col) == 0.0) throw std::runtime_error("gauss_solve: singular");
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) / a(col, col);
            if (f == 0.0) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
            b[r] -= f * b[col];
        }
    }
    Vector x(n, 0.0);
    for (std::size_t i = n; i-- > 0;) {
        double acc = b[i];
        for (std::size_t j = i + 1; j < n; ++j) acc -= a(i, j) * x[j];
        x[i] = acc / a(i, i);
    }
    return x;
}

/// Orthonormal columns spanning the cycle space of the graph, tensored with
/// the n_theta identity. For sensor problems this is exactly ker(S): a
/// multiplier vector is in the kernel iff every node balances its incident
/// edge flows.
inline Matrix cycle_space_basis(const netcg::Topology& topo, std::size_t n_theta) {
    const std::size_t nodes = topo.node_count();
    const auto& edges = topo.edges();
    // BFS spanning tree.
    std::vector<std::size_t> parent(nodes, nodes), parent_edge(nodes, 0), depth(nodes, 0);
    std::vector<bool> tree_edge(edges.size(), false);
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(nodes);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        adj[edges[e].first].push_back({edges[e].second, e});
        adj[edges[e].second].push_back({edges[e].first, e});
    }
    std::vector<std::size_t> queue{0};
    parent[0] = 0;
    for (std::size_t h = 0; h < queue.size(); ++h) {
        const std::size_t v = queue[h];
        for (auto [w, e] : adj[v]) {
            if (parent[w] != nodes) continue;
            parent[w] = v;
            parent_edge[w] = e;
            depth[w] = depth[v] + 1;
            tree_edge[e] = true;
            queue.push_back(w);
        }
    }
    // Signed flow around the fundamental cycle of each non-tree edge: an
    // edge traversed from its lower to its higher endpoint carries +1.
    std::vector<Vector> cycles;
    for (std::size_t e = 0; e < edges.size(); ++e) {
        if (tree_edge[e]) continue;
        Vector flow(edges.size(), 0.0);
        auto push = [&](std::size_t from, std::size_t to, std::size_t edge) {
            flow[edge] += from < to ? 1.0 : -1.0;
        };
        const auto [a, b] = edges[e];
        push(a, b, e);
        // Walk b -> lca and a -> lca; the cycle is a -> b -> ... -> lca -> ... -> a.
        std::size_t u = b, v = a;
        std::vector<std::pair<std::size_t, std::size_t>> down;  // from v side, reversed later
        while (u != v) {
            if (depth[u] >= depth[v]) {
                push(u, parent[u], parent_edge[u]);
                u = parent[u];
            } else {
                down.push_back({v, parent_edge[v]});
                v = parent[v];
            }
        }
        for (auto it = down.rbegin(); it != down.rend(); ++it) {
            const std::size_t child = it->first;
            push(parent[child], child, it->second);
        }
        cycles.push_back(std::move(flow));
    }
    const std::size_t m = edges.size() * n_theta;
    std::vector<Vector> cols;
    for (const auto& c : cycles) {
        for (std::size_t k = 0; k < n_theta; ++k) {
            Vector v(m, 0.0);
            for (std::size_t e = 0; e < edges.size(); ++e) v[e * n_theta + k] = c[e];
            cols.push_back(std::move(v));
        }
    }
    // Modified Gram-Schmidt, twice for stability.
    for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < cols.size(); ++j) {
            for (std::size_t i = 0; i < j; ++i) {
                double d = 0.0;
                for (std::size_t k = 0; k < m; ++k) d += cols[i][k] * cols[j][k];
                for (std::size_t k = 0; k < m; ++k) cols[j][k] -= d * cols[i][k];
            }
            const double len = norm(cols[j]);
            for (double& x : cols[j]) x /= len;
        }
    }
    Matrix basis(m, cols.size(), 0.0);
    for (std::size_t j = 0; j < cols.size(); ++j)
        for (std::size_t k = 0; k < m; ++k) basis(k, j) = cols[j][k];
    return basis;
}

/// Minimum-norm solution of S x = s for s in range(S) with known kernel
/// basis N: the unique solution of (S + N Nᵀ) x = s.
inline Vector min_norm_solution(const Matrix& s, const Vector& rhs, const Matrix& kernel) {
    Matrix shifted = s;
    for (std::size_t i = 0; i < s.rows(); ++i)
        for (std::size_t j = 0; j < s.cols(); ++j)
            for (std::size_t c = 0; c < kernel.cols(); ++c) shifted(i, j) += kernel(i, c) * kernel(j, c);
    return gauss_solve(std::move(shifted), rhs);
}

/// xᵀ S x
inline double energy(const Matrix& s, const Vector& x) {
    const Vector sx = dense_apply(s, x);
    double e = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) e += x[k] * sx[k];
    return e;
}

/// 2·((√κ − 1)/(√κ + 1))ⁿ · e0
inline double rate_bound(double kappa, double e0_sq, std::size_t n) {
    const double c = (std::sqrt(kappa) - 1.0) / (std::sqrt(kappa) + 1.0);
    return 2.0 * std::pow(c, static_cast<double>(n)) * e0_sq;
}

/// Pooled least squares from the stacked measurements.
inline Vector pooled_least_squares(const netcg::SensorNetwork& net) {
    const std::size_t n = net.n_theta;
    Matrix normal(n, n, 0.0);
    Vector rhs(n, 0.0);
    for (std::size_t i = 0; i < net.M.size(); ++i) {
        const Matrix& m = net.M[i];
        for (std::size_t r = 0; r < m.rows(); ++r) {
            for (std::size_t a = 0; a < n; ++a) {
                rhs[a] += m(r, a) * net.y[i][r];
                for (std::size_t b = 0; b < n; ++b) normal(a, b) += m(r, a) * m(r, b);
            }
        }
    }
    return gauss_solve(std::move(normal), std::move(rhs));
}

/// Centralized CG operator whose reductions follow the simulator's order:
/// S·p accumulates agent contributions in ascending agent id, and rᵀr and
/// pᵀSp are assembled from per-agent pieces r_iᵀΛ_i⁻¹r_i and p_iᵀŜ_ip_i
/// summed along the network's aggregation tree.
class SameOrderOperator {
public:
    explicit SameOrderOperator(const netcg::NetworkProblem& problem)
        : problem_(problem), net_(problem.communication_topology()) {
        for (std::size_t i = 0; i < problem.agent_count(); ++i)
            weights_.push_back(problem.partition().mult.inverse_weights(i));
    }

    netcg::CgOperator op() {
        netcg::CgOperator o;
        o.dim = problem_.dim();
        o.apply = [this](std::span<const double> p) { return apply(p); };
        o.initial_residual = [this](std::span<const double>, std::span<const double> lambda) {
            return initial_residual(lambda);
        };
        o.residual_sq = [this](std::span<const double> r) { return residual_sq(r); };
        o.curvature = [this](std::span<const double> p, std::span<const double>) { return curvature(p); };
        o.seminorm = [this](std::span<const double> x) {
            return std::sqrt(std::max(0.0, netcg::dot(x, problem_.apply(x))));
        };
        return o;
    }

private:
    Vector local(std::size_t i, std::span<const double> x) const {
        const auto& sup = problem_.block(i).support;
        Vector out(sup.size());
        for (std::size_t k = 0; k < sup.size(); ++k) out[k] = x[sup[k]];
        return out;
    }

    Vector scatter_sum(const std::vector<Vector>& parts) const {
        Vector out(problem_.dim(), 0.0);
        for (std::size_t i = 0; i < parts.size(); ++i) {
            const auto& sup = problem_.block(i).support;
            for (std::size_t k = 0; k < sup.size(); ++k) out[sup[k]] += parts[i][k];
        }
        return out;
    }

    Vector apply(std::span<const double> p) const {
        std::vector<Vector> parts;
        for (std::size_t i = 0; i < problem_.agent_count(); ++i)
            parts.push_back(netcg::multiply(problem_.block(i).S_hat, local(i, p)));
        return scatter_sum(parts);
    }

    Vector initial_residual(std::span<const double> lambda) const {
        std::vector<Vector> parts;
        for (std::size_t i = 0; i < problem_.agent_count(); ++i) {
            const auto& b = problem_.block(i);
            parts.push_back(netcg::subtract(b.s_hat, netcg::multiply(b.S_hat, local(i, lambda))));
        }
        return scatter_sum(parts);
    }

    double residual_sq(std::span<const double> r) {
        std::vector<double> pieces;
        for (std::size_t i = 0; i < problem_.agent_count(); ++i) {
            const Vector ri = local(i, r);
            double sum = 0.0;
            for (std::size_t k = 0; k < ri.size(); ++k) sum += ri[k] * weights_[i][k] * ri[k];
            pieces.push_back(sum);
        }
        return net_.global_sum(std::span<const double>(pieces));
    }

    double curvature(std::span<const double> p) {
        std::vector<double> pieces;
        for (std::size_t i = 0; i < problem_.agent_count(); ++i) {
            const Vector pi = local(i, p);
            pieces.push_back(netcg::dot(pi, netcg::multiply(problem_.block(i).S_hat, pi)));
        }
        return net_.global_sum(std::span<const double>(pieces));
    }

    const netcg::NetworkProblem& problem_;
    netcg::Network net_;
    std::vector<Vector> weights_;
};

/// Random sparsity pattern with every index covered: m in [1, max_dim],
/// agents in [1, max_agents], random symmetric blocks.
inline netcg::NetworkProblem random_pattern(std::mt19937_64& gen, std::size_t max_dim,
                                           std::size_t max_agents) {
    std::uniform_int_distribution<std::size_t> dim_dist(1, max_dim);
    std::uniform_int_distribution<std::size_t> agent_dist(1, max_agents);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    const std::size_t m = dim_dist(gen);
    const std::size_t agents = agent_dist(gen);
    std::vector<std::vector<std::size_t>> idx(agents);
    std::bernoulli_distribution take(0.35);
    for (std::size_t i = 0; i < agents; ++i)
        for (std::size_t c = 0; c < m; ++c)
            if (take(gen)) idx[i].push_back(c);
    std::uniform_int_distribution<std::size_t> pick(0, agents - 1);
    for (std::size_t c = 0; c < m; ++c) {
        bool covered = false;
        for (const auto& v : idx) covered = covered || std::find(v.begin(), v.end(), c) != v.end();
        if (!covered) idx[pick(gen)].push_back(c);
    }
    std::vector<netcg::SparseBlock> blocks;
    for (auto& v : idx) {
        if (v.empty()) v.push_back(std::uniform_int_distribution<std::size_t>(0, m - 1)(gen));
        std::sort(v.begin(), v.end());
        const std::size_t k = v.size();
        Matrix s(k, k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = a; b < k; ++b) s(a, b) = s(b, a) = val(gen);
        Vector rhs(k);
        for (double& x : rhs) x = val(gen);
        blocks.push_back({netcg::SupportSet(m, v), std::move(s), std::move(rhs)});
    }
    return netcg::NetworkProblem(m, std::move(blocks));
}

}  // namespace oracle
