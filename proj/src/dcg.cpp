#include "netcg/dcg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcg/cg.hpp"
#include "netcg/collective.hpp"
#include "netcg/errors.hpp"

namespace netcg {

namespace {

double weighted_square(std::span<const double> x, std::span<const double> w) {
    double sum = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) sum += x[k] * w[k] * x[k];
    return sum;
}

template <typename Field>
Vector assemble(std::span<const DcgAgent> agents, const Partition& partition, Field field) {
    Vector out(partition.global_dim(), 0.0);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto [owner, pos] = partition.first_owner[c];
        out[c] = (agents[owner].*field)[pos];
    }
    return out;
}

}  // namespace

std::vector<DcgAgent> make_dcg_agents(const NetworkProblem& problem) {
    std::vector<DcgAgent> agents;
    agents.reserve(problem.agent_count());
    for (std::size_t i = 0; i < problem.agent_count(); ++i) {
        const auto& b = problem.block(i);
        DcgAgent a;
        a.id = i;
        a.support = b.support;
        a.S_hat = b.S_hat;
        a.s_hat = b.s_hat;
        a.inv_multiplicity = problem.partition().mult.inverse_weights(i);
        agents.push_back(std::move(a));
    }
    return agents;
}

void dcg_init(std::span<DcgAgent> agents, const OverlapTable& overlaps, Network& net,
              std::span<const Vector> lambda0) {
    const std::size_t n = agents.size();
    if (!lambda0.empty() && lambda0.size() != n) {
        throw DimensionMismatch("dcg_init: one starting vector per agent");
    }
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        a.lambda = lambda0.empty() ? Vector(a.support.size(), 0.0) : lambda0[i];
        if (a.lambda.size() != a.support.size()) throw DimensionMismatch("dcg_init: λᵢ⁰ length");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& nb : overlaps.neighbors(i)) {
            if (nb.agent <= i) continue;
            for (const auto& [pi, pj] : nb.overlap.pairs) {
                if (std::abs(agents[i].lambda[pi] - agents[nb.agent].lambda[pj]) > 1e-12) {
                    throw InconsistentInitialIterate(
                        "dcg_init: agents " + std::to_string(i) + " and " +
                        std::to_string(nb.agent) + " disagree on global index " +
                        std::to_string(agents[i].support[pi]));
                }
            }
        }
    }

    std::vector<Vector> contribution(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = agents[i];
        contribution[i] = subtract(a.s_hat, multiply(a.S_hat, a.lambda));
    }
    std::vector<Vector> residual = neighbor_overlap_sum(contribution, overlaps, net);

    std::vector<double> eta(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        a.r = std::move(residual[i]);
        a.p = a.r;
        a.u = multiply(a.S_hat, a.p);
        a.sigma_local = dot(a.p, a.u);
        a.eta_local = weighted_square(a.r, a.inv_multiplicity);
        eta[i] = a.eta_local;
    }
    const double eta_sum = net.global_sum(std::span<const double>(eta));
    for (auto& a : agents) {
        a.eta_global = eta_sum;
        a.sigma_global = 0.0;
    }
}

CommStats dcg_step(std::span<DcgAgent> agents, const OverlapTable& overlaps, Network& net) {
    const CommStats before = net.stats();
    const std::size_t n = agents.size();

    // σⁿ
    std::vector<double> scratch(n);
    for (std::size_t i = 0; i < n; ++i) scratch[i] = agents[i].sigma_local;
    const double sigma = net.global_sum(std::span<const double>(scratch));
    const double eta = agents.front().eta_global;
    if (!(sigma > 1e-14 * eta) || sigma <= 0.0) {
        throw ZeroSigma("dcg_step: σ = " + std::to_string(sigma) + " with η = " + std::to_string(eta));
    }
    const double alpha = eta / sigma;

    // rᵢⁿ⁺¹ from the neighbors' uⱼⁿ
    std::vector<Vector> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = agents[i].u;
    const std::vector<Vector> su = neighbor_overlap_sum(u, overlaps, net);

    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        a.sigma_global = sigma;
        axpy(-alpha, su[i], a.r);
        a.eta_local = weighted_square(a.r, a.inv_multiplicity);
        axpy(alpha, a.p, a.lambda);
        scratch[i] = a.eta_local;
    }

    // ηⁿ⁺¹
    const double eta_next = net.global_sum(std::span<const double>(scratch));
    const double beta = eta_next / eta;
    for (auto& a : agents) {
        for (std::size_t k = 0; k < a.p.size(); ++k) a.p[k] = a.r[k] + beta * a.p[k];
        a.u = multiply(a.S_hat, a.p);
        a.sigma_local = dot(a.p, a.u);
        a.eta_global = eta_next;
    }
    return net.stats() - before;
}

double consensus_residual(std::span<const DcgAgent> agents, const OverlapTable& overlaps) {
    double worst = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (const auto& nb : overlaps.neighbors(i)) {
            if (nb.agent <= i) continue;
            for (const auto& [pi, pj] : nb.overlap.pairs)
                worst = std::max(worst, std::abs(agents[i].lambda[pi] - agents[nb.agent].lambda[pj]));
        }
    }
    return worst;
}

Vector assemble_lambda(std::span<const DcgAgent> agents, const Partition& partition) {
    return assemble(agents, partition, &DcgAgent::lambda);
}

Vector assemble_residual(std::span<const DcgAgent> agents, const Partition& partition) {
    return assemble(agents, partition, &DcgAgent::r);
}

Vector assemble_direction(std::span<const DcgAgent> agents, const Partition& partition) {
    return assemble(agents, partition, &DcgAgent::p);
}

DcgResult dcg_solve(const NetworkProblem& problem, const DcgOptions& options) {
    const Partition& partition = problem.partition();
    const OverlapTable& overlaps = partition.overlaps;
    Network net(problem.communication_topology());
    std::vector<DcgAgent> agents = make_dcg_agents(problem);

    std::vector<Vector> start;
    if (options.lambda0) {
        if (options.lambda0->size() != problem.dim()) throw DimensionMismatch("dcg_solve: λ⁰ length");
        for (const auto& a : agents) start.push_back(Projector(a.support).project(*options.lambda0));
    }
    dcg_init(agents, overlaps, net, start);

    DcgResult out;
    out.trace.method = "dcg";
    std::optional<double> e0_sq;
    auto record = [&](std::size_t n, double alpha, double beta) {
        IterationRecord rec;
        rec.iter = n;
        rec.residual_norm = std::sqrt(std::max(0.0, agents.front().eta_global));
        const bool need_lambda = options.record_vectors || options.reference_solution;
        Vector lambda = need_lambda ? assemble_lambda(agents, partition) : Vector{};
        if (options.reference_solution) {
            // Observer-side measurement, not part of the communication model.
            const double e = problem.seminorm(subtract(lambda, *options.reference_solution));
            rec.seminorm_error = e;
            if (n == 0) e0_sq = e * e;
            if (options.kappa) {
                rec.bound = std::sqrt(n == 0 ? *e0_sq : convergence_bound(*options.kappa, *e0_sq, n - 1));
            }
        }
        rec.alpha = alpha;
        rec.beta = beta;
        rec.comm = net.stats();
        out.trace.records.push_back(rec);
        out.consensus.push_back(consensus_residual(agents, overlaps));
        if (options.record_vectors) {
            out.iterates.push_back(std::move(lambda));
            out.residuals.push_back(assemble_residual(agents, partition));
            out.directions.push_back(assemble_direction(agents, partition));
        }
    };

    record(0, 0.0, 0.0);
    const double tol_sq = options.tol * options.tol;
    std::size_t n = 0;
    while (agents.front().eta_global > tol_sq) {
        if (n == options.max_iter) {
            out.status = SolveStatus::MaxIterations;
            break;
        }
        const double eta = agents.front().eta_global;
        dcg_step(agents, overlaps, net);
        ++n;
        record(n, eta / agents.front().sigma_global, agents.front().eta_global / eta);
    }

    out.solution = assemble_lambda(agents, partition);
    for (auto& a : agents) out.local_solutions.push_back(std::move(a.lambda));
    return out;
}

}  // namespace netcg
