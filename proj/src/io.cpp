#include "netcg/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "netcg/errors.hpp"

namespace netcg {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string problem_to_json(const NetworkProblem& problem) {
    json j;
    j["m"] = problem.dim();
    if (problem.topology()) {
        const auto& topo = *problem.topology();
        json edges = json::array();
        for (auto [a, b] : topo.edges()) edges.push_back({a, b});
        j["topology"] = {{"nodes", topo.node_count()}, {"edges", std::move(edges)}};
    }
    j["ntheta"] = problem.n_theta();
    json agents = json::array();
    for (std::size_t i = 0; i < problem.agent_count(); ++i) {
        const auto& b = problem.block(i);
        agents.push_back({{"id", i},
                          {"support", b.support.indices()},
                          {"S_hat", b.S_hat.data()},
                          {"s_hat", b.s_hat}});
    }
    j["agents"] = std::move(agents);
    if (problem.lambda_star) j["lambda_star"] = *problem.lambda_star;
    if (problem.theta_star) j["theta_star"] = *problem.theta_star;
    json meta = {{"seed", problem.meta.seed},
                 {"kind", problem.meta.kind},
                 {"noise_var", problem.meta.noise_var},
                 {"ny", problem.meta.n_y}};
    if (problem.topology()) meta["edges"] = problem.topology()->edge_count();
    if (const auto& spectrum = problem.meta.spectrum) {
        meta["rank"] = spectrum->rank;
        meta["num_zero"] = spectrum->num_zero;
        meta["kappa"] = spectrum->kappa;
    }
    j["meta"] = std::move(meta);
    return j.dump(1);
}

NetworkProblem problem_from_json(const std::string& text) {
    try {
        const json j = json::parse(text);
        const std::size_t m = j.at("m").get<std::size_t>();
        std::vector<SparseBlock> blocks;
        const auto& agents = j.at("agents");
        for (std::size_t i = 0; i < agents.size(); ++i) {
            const auto& a = agents[i];
            if (a.at("id").get<std::size_t>() != i) {
                throw InvalidArgument("problem file: agent ids must be 0..S-1 in order");
            }
            SupportSet support(m, a.at("support").get<std::vector<std::size_t>>());
            const std::size_t k = support.size();
            Matrix s_hat(k, k, a.at("S_hat").get<std::vector<double>>());
            blocks.push_back({std::move(support), std::move(s_hat), a.at("s_hat").get<Vector>()});
        }
        std::optional<Topology> topology;
        if (j.contains("topology")) {
            const auto& t = j["topology"];
            topology.emplace(t.at("nodes").get<std::size_t>(), t.at("edges").get<std::vector<Edge>>());
        }
        NetworkProblem problem(m, std::move(blocks), std::move(topology), j.value("ntheta", std::size_t{1}));
        if (j.contains("lambda_star")) {
            problem.lambda_star = j["lambda_star"].get<Vector>();
            if (problem.lambda_star->size() != m) throw InvalidArgument("problem file: lambda_star length");
        }
        if (j.contains("theta_star")) problem.theta_star = j["theta_star"].get<Vector>();
        if (j.contains("meta")) {
            const auto& meta = j["meta"];
            problem.meta.seed = meta.value("seed", std::uint64_t{0});
            problem.meta.kind = meta.value("kind", std::string{});
            problem.meta.noise_var = meta.value("noise_var", 0.0);
            problem.meta.n_y = meta.value("ny", std::size_t{0});
            if (meta.contains("rank") && meta.contains("num_zero") && meta.contains("kappa")) {
                problem.meta.spectrum = SpectrumSummary{meta["rank"].get<std::size_t>(),
                                                        meta["num_zero"].get<std::size_t>(),
                                                        meta["kappa"].get<double>()};
            }
        }
        return problem;
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("problem file: ") + e.what());
    }
}

void save_problem(const std::string& path, const NetworkProblem& problem) {
    std::ofstream os(path);
    if (!os) throw InvalidArgument("cannot write '" + path + "'");
    os << problem_to_json(problem) << '\n';
}

NetworkProblem load_problem(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw InvalidArgument("cannot read '" + path + "'");
    std::stringstream buf;
    buf << is.rdbuf();
    return problem_from_json(buf.str());
}

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace) {
    os << "iter,residual_norm,seminorm_error,bound,global_sums,neighbor_msgs,rounds\n";
    for (const auto& r : trace.records) {
        os << r.iter << ',' << format_double(r.residual_norm) << ',';
        if (r.seminorm_error) os << format_double(*r.seminorm_error);
        os << ',';
        if (r.bound) os << format_double(*r.bound);
        os << ',' << r.comm.global_sum_invocations << ',' << r.comm.neighbor_messages << ','
           << r.comm.rounds << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const SweepReference& dcg_reference) {
    os << "method,rho,iterations,final_residual,hit_cap\n";
    os << "dcg,," << dcg_reference.iterations << ',' << format_double(dcg_reference.final_residual)
       << ',' << (dcg_reference.hit_cap ? "true" : "false") << '\n';
    for (const auto& p : points) {
        os << "dadmm," << format_double(p.rho) << ',' << p.iterations << ','
           << format_double(p.final_residual) << ',' << (p.hit_cap ? "true" : "false") << '\n';
    }
}

}  // namespace netcg
