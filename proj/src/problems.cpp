#include "netcg/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <string>

#include "netcg/errors.hpp"

namespace netcg {

namespace {

std::vector<SupportSet> supports_of(const std::vector<SparseBlock>& blocks) {
    std::vector<SupportSet> out;
    out.reserve(blocks.size());
    for (const auto& b : blocks) out.push_back(b.support);
    return out;
}

void symmetrize(Matrix& a) {
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
}

/// Nonzero rows of `a` and the compressed row block.
std::pair<std::vector<std::size_t>, Matrix> nonzero_rows(const Matrix& a, std::size_t pad_cols = 0) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto r = a.row(i);
        if (std::any_of(r.begin(), r.end(), [](double v) { return v != 0.0; })) rows.push_back(i);
    }
    Matrix compressed(rows.size(), a.cols() + pad_cols);
    for (std::size_t k = 0; k < rows.size(); ++k)
        for (std::size_t j = 0; j < a.cols(); ++j) compressed(k, j) = a(rows[k], j);
    return {std::move(rows), std::move(compressed)};
}

}  // namespace

// ---------------------------------------------------------------------------
// NetworkProblem

NetworkProblem::NetworkProblem(std::size_t m, std::vector<SparseBlock> blocks,
                               std::optional<Topology> topology, std::size_t n_theta)
    : m_(m),
      blocks_(std::move(blocks)),
      topology_(std::move(topology)),
      n_theta_(n_theta),
      partition_([&] {
          if (blocks_.empty()) throw InvalidArgument("NetworkProblem: no agents");
          for (std::size_t i = 0; i < blocks_.size(); ++i) {
              const auto& b = blocks_[i];
              const std::string who = "agent " + std::to_string(i);
              if (b.support.global_dim() != m_) throw DimensionMismatch(who + ": support dimension");
              if (b.support.empty()) throw EmptySupport(who + ": empty support");
              if (b.S_hat.rows() != b.support.size() || b.S_hat.cols() != b.support.size() ||
                  b.s_hat.size() != b.support.size()) {
                  throw DimensionMismatch(who + ": block does not match its support");
              }
              if (!b.S_hat.is_symmetric(1e-10)) throw InvalidArgument(who + ": block not symmetric");
          }
          return Partition(supports_of(blocks_));
      }()) {
    if (topology_) {
        if (topology_->node_count() != blocks_.size()) {
            throw DimensionMismatch("NetworkProblem: topology node count differs from agent count");
        }
        const auto& ov = partition_.overlaps;
        for (std::size_t i = 0; i < ov.agent_count(); ++i)
            for (const auto& nb : ov.neighbors(i))
                if (nb.agent != i && !topology_->adjacent(i, nb.agent)) throw NotANeighbor(i, nb.agent);
    }
}

Topology NetworkProblem::communication_topology() const {
    if (topology_) return *topology_;
    std::vector<Edge> edges;
    const auto& ov = partition_.overlaps;
    for (std::size_t i = 0; i < ov.agent_count(); ++i)
        for (const auto& nb : ov.neighbors(i))
            if (nb.agent > i) edges.emplace_back(i, nb.agent);
    return Topology(blocks_.size(), std::move(edges));
}

Matrix NetworkProblem::assemble_matrix() const {
    Matrix s(m_, m_);
    for (const auto& b : blocks_) {
        const auto& idx = b.support.indices();
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t c = 0; c < idx.size(); ++c) s(idx[a], idx[c]) += b.S_hat(a, c);
    }
    return s;
}

Vector NetworkProblem::assemble_rhs() const {
    Vector s(m_, 0.0);
    for (const auto& b : blocks_) Projector(b.support).lift_add(b.s_hat, s);
    return s;
}

Vector NetworkProblem::apply(std::span<const double> x) const {
    if (x.size() != m_) throw DimensionMismatch("NetworkProblem::apply: wrong length");
    Vector y(m_, 0.0);
    for (const auto& b : blocks_) {
        const Projector proj(b.support);
        proj.lift_add(multiply(b.S_hat, proj.project(x)), y);
    }
    return y;
}

double NetworkProblem::residual_norm(std::span<const double> lambda) const {
    return norm2(subtract(apply(lambda), assemble_rhs()));
}

double NetworkProblem::seminorm(std::span<const double> x) const {
    if (x.size() != m_) throw DimensionMismatch("NetworkProblem::seminorm: wrong length");
    double q = 0.0;
    for (const auto& b : blocks_) {
        const Vector xc = Projector(b.support).project(x);
        q += dot(xc, multiply(b.S_hat, xc));
    }
    if (q < -1e-12) throw NotPositiveSemidefinite("NetworkProblem::seminorm: negative form");
    return q <= 0.0 ? 0.0 : std::sqrt(q);
}

// ---------------------------------------------------------------------------
// Rng

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal() {
    if (spare_) {
        const double v = *spare_;
        spare_.reset();
        return v;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
}

std::size_t Rng::index(std::size_t n) {
    if (n == 0) throw InvalidArgument("Rng::index: empty range");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return static_cast<std::size_t>(v % bound);
}

// ---------------------------------------------------------------------------
// Topologies

TopologyKind parse_topology_kind(std::string_view name) {
    if (name == "path") return TopologyKind::Path;
    if (name == "star") return TopologyKind::Star;
    if (name == "weak-mesh" || name == "weakly-meshed") return TopologyKind::WeakMesh;
    if (name == "strong-mesh" || name == "strongly-meshed") return TopologyKind::StrongMesh;
    if (name == "random") return TopologyKind::Random;
    throw InvalidArgument("unknown topology kind '" + std::string(name) + "'");
}

std::string_view to_string(TopologyKind kind) {
    switch (kind) {
        case TopologyKind::Path: return "path";
        case TopologyKind::Star: return "star";
        case TopologyKind::WeakMesh: return "weak-mesh";
        case TopologyKind::StrongMesh: return "strong-mesh";
        case TopologyKind::Random: return "random";
    }
    return "?";
}

Topology make_topology(TopologyKind kind, std::size_t nodes, std::uint64_t seed,
                       std::size_t extra_edges) {
    if (nodes < 2) throw TooFewNodes("make_topology: need at least 2 nodes, got " + std::to_string(nodes));

    std::vector<Edge> edges;
    std::set<Edge> present;
    auto add = [&](std::size_t a, std::size_t b) {
        const Edge e{std::min(a, b), std::max(a, b)};
        if (a == b || !present.insert(e).second) return false;
        edges.push_back(e);
        return true;
    };

    switch (kind) {
        case TopologyKind::Path:
            for (std::size_t i = 0; i + 1 < nodes; ++i) add(i, i + 1);
            break;
        case TopologyKind::Star:
            for (std::size_t i = 1; i < nodes; ++i) add(0, i);
            break;
        case TopologyKind::WeakMesh: {
            for (std::size_t i = 0; i + 1 < nodes; ++i) add(i, i + 1);
            const std::size_t chords = (nodes + 2) / 3;
            std::vector<Edge> candidates;
            for (std::size_t i = 0; i + 2 < nodes; i += 3) candidates.emplace_back(i, i + 2);
            for (std::size_t i = 1; i + 3 < nodes; i += 3) candidates.emplace_back(i, i + 3);
            for (std::size_t i = 0; i < nodes; ++i)
                for (std::size_t j = i + 2; j < nodes; ++j) candidates.emplace_back(i, j);
            std::size_t added = 0;
            for (auto [a, b] : candidates) {
                if (added == chords) break;
                if (add(a, b)) ++added;
            }
            break;
        }
        case TopologyKind::StrongMesh:
            for (std::size_t i = 0; i + 1 < nodes; ++i) add(i, i + 1);
            for (std::size_t i = 0; i + 2 < nodes; ++i) add(i, i + 2);
            for (std::size_t i = 0; i + 3 < nodes; ++i) add(i, i + 3);
            break;
        case TopologyKind::Random: {
            const std::size_t max_edges = nodes * (nodes - 1) / 2;
            if (nodes - 1 + extra_edges > max_edges) {
                throw InvalidArgument("make_topology: " + std::to_string(extra_edges) +
                                      " extra edges do not fit into " + std::to_string(nodes) +
                                      " nodes");
            }
            Rng rng(seed);
            for (std::size_t v = 1; v < nodes; ++v) add(rng.index(v), v);
            std::size_t added = 0;
            while (added < extra_edges) {
                const std::size_t a = rng.index(nodes);
                const std::size_t b = rng.index(nodes);
                if (add(a, b)) ++added;
            }
            break;
        }
    }
    return Topology(nodes, std::move(edges));
}

std::vector<Matrix> incidence_coupling(const Topology& topology, std::size_t n_theta) {
    if (n_theta == 0) throw InvalidArgument("incidence_coupling: n_theta must be positive");
    const std::size_t m = topology.edge_count() * n_theta;
    std::vector<Matrix> a(topology.node_count(), Matrix(m, n_theta));
    const auto& edges = topology.edges();
    for (std::size_t e = 0; e < edges.size(); ++e) {
        const auto [i, j] = edges[e];
        for (std::size_t k = 0; k < n_theta; ++k) {
            a[i](e * n_theta + k, k) = 1.0;
            a[j](e * n_theta + k, k) = -1.0;
        }
    }
    return a;
}

// ---------------------------------------------------------------------------
// Sensor fusion

SensorNetwork make_sensor_network(const Topology& topology, std::size_t n_theta, std::size_t n_y,
                                  double noise_var, std::uint64_t seed) {
    if (n_theta == 0) throw InvalidArgument("sensor network: n_theta must be positive");
    if (n_y < n_theta) throw InvalidArgument("sensor network: n_y must be >= n_theta");
    if (noise_var < 0.0) throw InvalidArgument("sensor network: negative noise variance");

    SensorNetwork net{topology, n_theta, n_y, {}, {}, Vector(n_theta), noise_var,
                      incidence_coupling(topology, n_theta)};
    Rng rng(seed);
    for (auto& v : net.theta_true) v = rng.uniform();

    const double noise_sd = std::sqrt(noise_var);
    for (std::size_t i = 0; i < topology.node_count(); ++i) {
        Matrix mi;
        bool accepted = false;
        for (int attempt = 0; attempt < 100 && !accepted; ++attempt) {
            mi = Matrix(n_y, n_theta);
            for (std::size_t r = 0; r < n_y; ++r)
                for (std::size_t c = 0; c < n_theta; ++c) mi(r, c) = rng.uniform();
            const Vector gram_eigs = eigen_decompose(mi.transpose() * mi).values;
            accepted = gram_eigs.front() > 1e-16;  // smallest singular value > 1e-8
        }
        if (!accepted) throw RankDeficientMeasurement("sensor " + std::to_string(i) +
                                                      ": no full-column-rank draw in 100 tries");
        Vector yi = multiply(mi, net.theta_true);
        for (auto& v : yi) v += noise_sd * rng.normal();
        net.M.push_back(std::move(mi));
        net.y.push_back(std::move(yi));
    }
    return net;
}

NetworkProblem sensor_problem_from(const SensorNetwork& net) {
    const std::size_t nodes = net.topology.node_count();
    const std::size_t m = net.topology.edge_count() * net.n_theta;
    std::vector<SparseBlock> blocks;
    blocks.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const Matrix& mi = net.M.at(i);
        const Cholesky gram(mi.transpose() * mi);
        auto [rows, a_hat] = nonzero_rows(net.A.at(i));
        const Matrix h_inv_at = gram.solve(a_hat.transpose());  // (MᵀM)⁻¹ Âᵀ
        Matrix s_hat = a_hat * h_inv_at;
        symmetrize(s_hat);
        Vector s_rhs = multiply(a_hat, gram.solve(multiply_transposed(mi, net.y.at(i))));
        for (auto& v : s_rhs) v = -v;
        blocks.push_back({SupportSet(m, std::move(rows)), std::move(s_hat), std::move(s_rhs)});
    }
    NetworkProblem problem(m, std::move(blocks), net.topology, net.n_theta);
    problem.theta_star = net.theta_true;
    problem.meta.noise_var = net.noise_var;
    problem.meta.n_y = net.n_y;
    return problem;
}

std::pair<SensorNetwork, NetworkProblem> sensor_problem(const Topology& topology,
                                                        std::size_t n_theta, std::size_t n_y,
                                                        double noise_var, std::uint64_t seed) {
    SensorNetwork net = make_sensor_network(topology, n_theta, n_y, noise_var, seed);
    NetworkProblem problem = sensor_problem_from(net);
    problem.meta.seed = seed;
    return {std::move(net), std::move(problem)};
}

std::vector<Vector> recover_estimates(const SensorNetwork& net, std::span<const double> lambda) {
    std::vector<Vector> theta;
    theta.reserve(net.M.size());
    for (std::size_t i = 0; i < net.M.size(); ++i) {
        const Matrix& mi = net.M[i];
        Vector rhs = multiply_transposed(mi, net.y[i]);
        const Vector coupling = multiply_transposed(net.A[i], lambda);
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += coupling[k];
        theta.push_back(Cholesky(mi.transpose() * mi).solve(rhs));
    }
    return theta;
}

Vector centralized_estimate(const SensorNetwork& net) {
    Matrix gram(net.n_theta, net.n_theta);
    Vector rhs(net.n_theta, 0.0);
    for (std::size_t i = 0; i < net.M.size(); ++i) {
        gram += net.M[i].transpose() * net.M[i];
        axpy(1.0, multiply_transposed(net.M[i], net.y[i]), rhs);
    }
    return Cholesky(gram).solve(rhs);
}

// ---------------------------------------------------------------------------
// KKT -> Schur

NetworkProblem schur_from_kkt(const QpBlocks& qp) {
    if (qp.agents.empty()) throw InvalidArgument("schur_from_kkt: no agents");
    const std::size_t m = qp.agents.front().A.rows();

    std::vector<SparseBlock> blocks;
    blocks.reserve(qp.agents.size());
    for (std::size_t i = 0; i < qp.agents.size(); ++i) {
        const auto& ag = qp.agents[i];
        const std::size_t n = ag.B.rows();
        const std::size_t c = ag.G.rows();
        if (ag.A.rows() != m || ag.A.cols() != n || !ag.B.square() || ag.g.size() != n ||
            (c > 0 && ag.G.cols() != n)) {
            throw DimensionMismatch("schur_from_kkt: agent " + std::to_string(i) +
                                    " has inconsistent block shapes");
        }
        Matrix h(n + c, n + c);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k) h(r, k) = ag.B(r, k);
        for (std::size_t r = 0; r < c; ++r) {
            for (std::size_t k = 0; k < n; ++k) {
                h(n + r, k) = ag.G(r, k);
                h(k, n + r) = ag.G(r, k);
            }
        }
        std::optional<Lu> lu;
        try {
            lu.emplace(h);
        } catch (const SingularMatrix&) {
            throw SingularLocalKkt(i);
        }
        auto [rows, a_bar] = nonzero_rows(ag.A, c);  // Ā = [A 0], support rows only
        if (rows.empty()) throw EmptySupport("schur_from_kkt: agent " + std::to_string(i) +
                                             " has an all-zero coupling matrix");
        Vector h_rhs(n + c, 0.0);
        std::copy(ag.g.begin(), ag.g.end(), h_rhs.begin());

        Matrix s_hat = a_bar * lu->solve(a_bar.transpose());
        symmetrize(s_hat);
        Vector s_rhs = multiply(a_bar, lu->solve(h_rhs));
        for (auto& v : s_rhs) v = -v;
        blocks.push_back({SupportSet(m, std::move(rows)), std::move(s_hat), std::move(s_rhs)});
    }

    const bool has_d_mat = !qp.D.empty();
    const bool has_d_vec = !qp.d.empty();
    if (has_d_mat) {
        if (qp.D.rows() != m || qp.D.cols() != m) throw DimensionMismatch("schur_from_kkt: D shape");
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t k = 0; k < m; ++k)
                if (r != k && qp.D(r, k) != 0.0) {
                    throw InvalidArgument("schur_from_kkt: only diagonal D can be split across agents");
                }
    }
    if (has_d_vec && qp.d.size() != m) throw DimensionMismatch("schur_from_kkt: d length");
    if (has_d_mat || has_d_vec) {
        std::vector<SupportSet> supports = supports_of(blocks);
        const Multiplicity mult = multiplicity(supports);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            auto& b = blocks[i];
            for (std::size_t k = 0; k < b.support.size(); ++k) {
                const std::size_t g = b.support[k];
                const double w = 1.0 / mult.global_diag[g];
                if (has_d_mat) b.S_hat(k, k) -= w * qp.D(g, g);
                if (has_d_vec) b.s_hat[k] -= w * qp.d[g];
            }
        }
    }
    return NetworkProblem(m, std::move(blocks), qp.topology);
}

QpBlocks sensor_qp_blocks(const SensorNetwork& net) {
    QpBlocks qp;
    qp.topology = net.topology;
    for (std::size_t i = 0; i < net.M.size(); ++i) {
        const Matrix& mi = net.M[i];
        qp.agents.push_back(
            {mi.transpose() * mi, Matrix(0, net.n_theta), multiply_transposed(mi, net.y[i]), net.A[i]});
    }
    return qp;
}

// ---------------------------------------------------------------------------

bool verify_range(const NetworkProblem& problem, double tol) {
    const Matrix s = problem.assemble_matrix();
    const Vector rhs = problem.assemble_rhs();
    const Matrix q = range_basis(s);
    const Vector proj = multiply(q, multiply_transposed(q, rhs));
    return norm2(subtract(rhs, proj)) <= tol * std::max(1.0, norm2(rhs));
}

Vector reference_solution(const NetworkProblem& problem) {
    return range_space_solve(problem.assemble_matrix(), problem.assemble_rhs());
}

}  // namespace netcg
