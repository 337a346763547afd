#include "netcg/dadmm.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "netcg/collective.hpp"
#include "netcg/errors.hpp"

namespace netcg {

std::vector<AdmmAgent> make_admm_agents(const NetworkProblem& problem, double rho) {
    if (!(rho > 0.0)) throw NonPositiveRho("d-ADMM: rho must be positive, got " + std::to_string(rho));
    std::vector<AdmmAgent> agents;
    agents.reserve(problem.agent_count());
    for (std::size_t i = 0; i < problem.agent_count(); ++i) {
        const auto& b = problem.block(i);
        Matrix shifted = b.S_hat;
        for (std::size_t k = 0; k < shifted.rows(); ++k) shifted(k, k) += rho;
        const std::size_t len = b.support.size();
        agents.push_back(AdmmAgent{i, b.support, b.S_hat, b.s_hat,
                                   problem.partition().mult.inverse_weights(i), Cholesky(shifted),
                                   Vector(len, 0.0), Vector(len, 0.0), Vector(len, 0.0)});
    }
    return agents;
}

AdmmStepReport dadmm_step(std::span<AdmmAgent> agents, const OverlapTable& overlaps, Network& net,
                          double rho) {
    const CommStats before = net.stats();
    const std::size_t n = agents.size();

    std::vector<Vector> primal(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        Vector rhs = a.s_hat;
        for (std::size_t k = 0; k < rhs.size(); ++k) rhs[k] += -a.gamma[k] + rho * a.lambda_bar[k];
        a.lambda = a.factor.solve(rhs);
        primal[i] = a.lambda;
    }

    const std::vector<Vector> sums = neighbor_overlap_sum(primal, overlaps, net);

    AdmmStepReport report;
    for (std::size_t i = 0; i < n; ++i) {
        auto& a = agents[i];
        double primal_sq = 0.0;
        double dual_sq = 0.0;
        for (std::size_t k = 0; k < a.lambda.size(); ++k) {
            const double avg = a.inv_multiplicity[k] * sums[i][k];
            const double diff = avg - a.lambda_bar[k];
            dual_sq += diff * diff;
            a.lambda_bar[k] = avg;
            const double gap = a.lambda[k] - avg;
            primal_sq += gap * gap;
            a.gamma[k] += rho * gap;
        }
        report.max_primal = std::max(report.max_primal, std::sqrt(primal_sq));
        report.max_dual = std::max(report.max_dual, std::sqrt(dual_sq));
    }
    report.comm = net.stats() - before;
    return report;
}

Vector assemble_consensus(std::span<const AdmmAgent> agents, const Partition& partition) {
    Vector out(partition.global_dim(), 0.0);
    for (std::size_t c = 0; c < out.size(); ++c) {
        const auto [owner, pos] = partition.first_owner[c];
        out[c] = agents[owner].lambda_bar[pos];
    }
    return out;
}

AdmmResult dadmm_solve(const NetworkProblem& problem, const AdmmOptions& options) {
    if (!(options.eps_p > 0.0) || !(options.eps_d > 0.0)) {
        throw InvalidArgument("d-ADMM: eps_p and eps_d must be positive");
    }
    const Partition& partition = problem.partition();
    const OverlapTable& overlaps = partition.overlaps;
    Network net(problem.communication_topology());
    std::vector<AdmmAgent> agents = make_admm_agents(problem, options.rho);

    if (options.lambda_bar0) {
        if (options.lambda_bar0->size() != problem.dim()) {
            throw DimensionMismatch("d-ADMM: λ̄⁰ length");
        }
        for (auto& a : agents) {
            a.lambda_bar = Projector(a.support).project(*options.lambda_bar0);
            a.lambda = a.lambda_bar;
        }
    }

    AdmmResult out;
    out.trace.method = "dadmm";
    const Vector rhs = problem.assemble_rhs();

    auto record = [&](std::size_t n, double primal) {
        const Vector consensus = assemble_consensus(agents, partition);
        IterationRecord rec;
        rec.iter = n;
        rec.residual_norm = norm2(subtract(problem.apply(consensus), rhs));
        if (options.reference_solution) {
            rec.seminorm_error = problem.seminorm(subtract(consensus, *options.reference_solution));
        }
        rec.alpha = options.rho;
        rec.comm = net.stats();
        out.trace.records.push_back(rec);
        out.primal_residual.push_back(primal);

        Vector multiplier_sum(problem.dim(), 0.0);
        for (const auto& a : agents) Projector(a.support).lift_add(a.gamma, multiplier_sum);
        out.multiplier_norm.push_back(norm2(multiplier_sum));

        if (options.record_vectors) {
            out.iterates.push_back(consensus);
            out.local_primal.push_back(agents.front().lambda);
        }
        return rec.residual_norm;
    };

    double initial_gap = 0.0;
    for (const auto& a : agents) initial_gap = std::max(initial_gap, norm2(subtract(a.lambda, a.lambda_bar)));
    double residual = record(0, initial_gap);

    std::size_t n = 0;
    bool done = options.residual_target && residual < *options.residual_target;
    while (!done) {
        if (n == options.max_iter) {
            out.status = SolveStatus::MaxIterations;
            break;
        }
        const AdmmStepReport step = dadmm_step(agents, overlaps, net, options.rho);
        ++n;
        residual = record(n, step.max_primal);
        done = options.residual_target
                   ? residual < *options.residual_target
                   : step.max_primal < options.eps_p && step.max_dual < options.eps_d;
    }

    out.solution = assemble_consensus(agents, partition);
    return out;
}

std::vector<SweepPoint> rho_sweep(const NetworkProblem& problem, std::span<const double> rho_grid,
                                  double residual_target, std::size_t max_iter, unsigned threads) {
    if (rho_grid.empty()) throw InvalidArgument("rho_sweep: empty grid");

    auto run_point = [&](double rho) {
        SweepPoint pt;
        pt.rho = rho;
        try {
            AdmmOptions opt;
            opt.rho = rho;
            opt.max_iter = max_iter;
            opt.residual_target = residual_target;
            const AdmmResult res = dadmm_solve(problem, opt);
            pt.iterations = res.iterations();
            pt.final_residual = res.trace.records.back().residual_norm;
            pt.hit_cap = res.status == SolveStatus::MaxIterations;
        } catch (const Error& e) {
            pt.error = e.what();
            pt.hit_cap = true;
            pt.iterations = max_iter;
        }
        return pt;
    };

    std::vector<SweepPoint> out(rho_grid.size());
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, rho_grid.size()));
    if (workers == 1) {
        for (std::size_t k = 0; k < rho_grid.size(); ++k) out[k] = run_point(rho_grid[k]);
        return out;
    }
    std::vector<std::future<void>> jobs;
    for (std::size_t w = 0; w < workers; ++w) {
        jobs.push_back(std::async(std::launch::async, [&, w] {
            for (std::size_t k = w; k < rho_grid.size(); k += workers) out[k] = run_point(rho_grid[k]);
        }));
    }
    for (auto& j : jobs) j.get();
    return out;
}

Vector log_grid(double lo, double hi, std::size_t points) {
    if (!(lo > 0.0) || !(hi >= lo) || points == 0) {
        throw InvalidArgument("log_grid: need 0 < lo <= hi and points >= 1");
    }
    if (points == 1) return {lo};
    Vector grid(points);
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (std::size_t k = 0; k < points; ++k) {
        grid[k] = std::pow(10.0, a + (b - a) * static_cast<double>(k) / static_cast<double>(points - 1));
    }
    grid.front() = lo;
    grid.back() = hi;
    return grid;
}

}  // namespace netcg
