// Command-line front end: generate problems, solve them with cg / dcg /
// dadmm, sweep the ADMM penalty, and report spectra.
//
// Exit codes: 0 success, 2 usage or invalid input, 3 generation failure,
// 4 numerical failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "netcg/cg.hpp"
#include "netcg/dadmm.hpp"
#include "netcg/dcg.hpp"
#include "netcg/errors.hpp"
#include "netcg/io.hpp"
#include "netcg/problems.hpp"

namespace {

using namespace netcg;

constexpr int kExitUsage = 2;
constexpr int kExitGeneration = 3;
constexpr int kExitNumerical = 4;

// Dense eigen-decomposition is cubic; beyond this size `auto` skips it.
constexpr std::size_t kAutoSpectrumLimit = 500;

struct GenerateArgs {
    std::string topology = "strong-mesh";
    std::size_t nodes = 10;
    std::size_t n_theta = 10;
    std::optional<std::size_t> n_y;
    double noise_var = 1e-3;
    std::optional<std::size_t> edges;
    std::uint64_t seed = 1;
    std::string spectrum = "auto";
    std::string output;
};

struct SolveArgs {
    std::string method = "dcg";
    std::string problem;
    double tol = 1e-5;
    std::optional<std::size_t> max_iter;
    double rho = 1.0;
    std::string trace;
};

struct SweepArgs {
    std::string problem;
    double rho_min = 1e-2;
    double rho_max = 1e2;
    std::size_t points = 20;
    double target = 1e-5;
    std::optional<std::size_t> max_iter;
    unsigned threads = 0;
    std::string output;
};

struct SpectrumArgs {
    std::string problem;
    std::string output;
};

class OutputFile {
public:
    explicit OutputFile(const std::string& path) {
        if (path.empty() || path == "-") return;
        file_.open(path);
        if (!file_) throw InvalidArgument("cannot write '" + path + "'");
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

SpectrumSummary summarize(const SpectralStats& stats) {
    return {stats.rank, stats.num_zero, stats.kappa};
}

int run_generate(const GenerateArgs& args) {
    const TopologyKind kind = parse_topology_kind(args.topology);
    std::size_t extra = 0;
    if (kind == TopologyKind::Random) {
        const std::size_t total = args.edges.value_or(args.nodes + args.nodes / 2);
        if (total + 1 < args.nodes) {
            throw InvalidArgument("--edges must be at least nodes − 1 for a connected graph");
        }
        extra = total - (args.nodes - 1);
    } else if (args.edges) {
        throw InvalidArgument("--edges applies to --topology random only");
    }
    const std::size_t n_y = args.n_y.value_or(args.n_theta);
    if (n_y < args.n_theta) throw InvalidArgument("--ny must be >= --ntheta");

    const Topology topo = make_topology(kind, args.nodes, args.seed, extra);
    auto [net, problem] = sensor_problem(topo, args.n_theta, n_y, args.noise_var, args.seed);
    problem.meta.kind = std::string(to_string(kind));

    const bool want_spectrum = args.spectrum == "always" ||
                               (args.spectrum == "auto" && problem.dim() <= kAutoSpectrumLimit);
    if (want_spectrum) {
        const SpectralStats stats = symmetric_eigen(problem.assemble_matrix());
        problem.meta.spectrum = summarize(stats);
        problem.lambda_star = reference_solution(problem);
    }

    if (args.output.empty() || args.output == "-") {
        std::cout << problem_to_json(problem) << '\n';
    } else {
        save_problem(args.output, problem);
    }

    std::ostream& log = args.output.empty() || args.output == "-" ? std::cerr : std::cout;
    log << "m=" << problem.dim() << " edges=" << topo.edge_count();
    if (const auto& s = problem.meta.spectrum) {
        log << " rank=" << s->rank << " n0=" << s->num_zero << " kappa=" << format_double(s->kappa);
    } else {
        log << " rank=skipped n0=skipped kappa=skipped";
    }
    log << '\n';
    return 0;
}

int run_solve(const SolveArgs& args) {
    const NetworkProblem problem = load_problem(args.problem);
    const std::size_t max_iter = args.max_iter.value_or(10 * problem.dim());
    std::optional<double> kappa;
    if (problem.meta.spectrum) kappa = problem.meta.spectrum->kappa;

    const auto start = std::chrono::steady_clock::now();
    ConvergenceTrace trace;
    SolveStatus status = SolveStatus::Converged;
    Vector solution;
    if (args.method == "cg") {
        CgOptions opt;
        opt.tol = args.tol;
        opt.max_iter = max_iter;
        opt.reference_solution = problem.lambda_star;
        opt.kappa = kappa;
        const Matrix s = problem.assemble_matrix();
        CgResult res = cg_solve(s, problem.assemble_rhs(), Vector(problem.dim(), 0.0), opt);
        trace = std::move(res.trace);
        status = res.status;
        solution = std::move(res.solution);
    } else if (args.method == "dcg") {
        DcgOptions opt;
        opt.tol = args.tol;
        opt.max_iter = max_iter;
        opt.reference_solution = problem.lambda_star;
        opt.kappa = kappa;
        DcgResult res = dcg_solve(problem, opt);
        trace = std::move(res.trace);
        status = res.status;
        solution = std::move(res.solution);
    } else if (args.method == "dadmm") {
        AdmmOptions opt;
        opt.rho = args.rho;
        opt.max_iter = max_iter;
        opt.residual_target = args.tol;
        opt.reference_solution = problem.lambda_star;
        AdmmResult res = dadmm_solve(problem, opt);
        trace = std::move(res.trace);
        status = res.status;
        solution = std::move(res.solution);
    } else {
        throw InvalidArgument("unknown method '" + args.method + "'");
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (!args.trace.empty()) {
        OutputFile out(args.trace);
        write_trace_csv(out.stream(), trace);
    }
    std::ostream& log = args.trace == "-" ? std::cerr : std::cout;
    log << "method=" << args.method << " iterations=" << trace.iterations()
        << " residual=" << format_double(problem.residual_norm(solution))
        << " status=" << (status == SolveStatus::Converged ? "converged" : "max_iter_reached")
        << " time_s=" << format_double(std::round(seconds * 1e3) / 1e3) << '\n';
    return 0;
}

int run_sweep(const SweepArgs& args) {
    const NetworkProblem problem = load_problem(args.problem);
    const std::size_t max_iter = args.max_iter.value_or(10 * problem.dim());
    const Vector grid = log_grid(args.rho_min, args.rho_max, args.points);
    const unsigned threads = args.threads != 0 ? args.threads
                                               : std::max(1u, std::thread::hardware_concurrency());

    DcgOptions dopt;
    dopt.tol = args.target;
    dopt.max_iter = max_iter;
    const DcgResult reference = dcg_solve(problem, dopt);
    const SweepReference ref{reference.iterations(), problem.residual_norm(reference.solution),
                             reference.status == SolveStatus::MaxIterations};

    const std::vector<SweepPoint> points = rho_sweep(problem, grid, args.target, max_iter, threads);
    OutputFile out(args.output);
    write_sweep_csv(out.stream(), points, ref);
    for (const auto& p : points) {
        if (p.error) std::cerr << "rho=" << format_double(p.rho) << ": " << *p.error << '\n';
    }
    return 0;
}

int run_spectrum(const SpectrumArgs& args) {
    const NetworkProblem problem = load_problem(args.problem);
    const SpectralStats stats = symmetric_eigen(problem.assemble_matrix());
    OutputFile out(args.output);
    std::ostream& os = out.stream();
    os << "m=" << problem.dim() << " rank=" << stats.rank << " n0=" << stats.num_zero;
    if (stats.rank > 0) {
        os << " omega_min=" << format_double(stats.omega_min_nonzero)
           << " omega_max=" << format_double(stats.omega_max) << " kappa=" << format_double(stats.kappa)
           << " factor=" << format_double(contraction_factor(stats.kappa));
    }
    os << '\n' << "eigenvalues";
    for (double w : stats.eigenvalues) os << ' ' << format_double(w);
    os << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized conjugate gradients over simulated networks"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate a sensor-fusion problem file");
    generate->add_option("--topology", gen.topology, "path | star | weak-mesh | strong-mesh | random")
        ->capture_default_str();
    generate->add_option("--nodes", gen.nodes, "Number of sensors")->capture_default_str();
    generate->add_option("--ntheta", gen.n_theta, "Parameter dimension per sensor")->capture_default_str();
    generate->add_option("--ny", gen.n_y, "Measurements per sensor (default: ntheta)");
    generate->add_option("--noise-var", gen.noise_var, "Measurement noise variance")->capture_default_str();
    generate->add_option("--edges", gen.edges, "Total edge count (random topology only)");
    generate->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    generate->add_option("--spectrum", gen.spectrum, "Compute spectrum and reference solution")
        ->check(CLI::IsMember({"auto", "always", "never"}))
        ->capture_default_str();
    generate->add_option("-o,--output", gen.output, "Output file (default: stdout)");

    SolveArgs sol;
    auto* solve = app.add_subcommand("solve", "Solve a problem file");
    solve->add_option("--method", sol.method, "cg | dcg | dadmm")
        ->check(CLI::IsMember({"cg", "dcg", "dadmm"}))
        ->capture_default_str();
    solve->add_option("--problem", sol.problem, "Problem file")->required();
    solve->add_option("--tol", sol.tol, "Residual tolerance")->capture_default_str();
    solve->add_option("--max-iter", sol.max_iter, "Iteration cap (default: 10·m)");
    solve->add_option("--rho", sol.rho, "d-ADMM penalty")->capture_default_str();
    solve->add_option("--trace", sol.trace, "Trace CSV output ('-' for stdout)");

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "Sweep the d-ADMM penalty on a log grid");
    sweep->add_option("--problem", sw.problem, "Problem file")->required();
    sweep->add_option("--rho-min", sw.rho_min)->capture_default_str();
    sweep->add_option("--rho-max", sw.rho_max)->capture_default_str();
    sweep->add_option("--points", sw.points)->capture_default_str();
    sweep->add_option("--target", sw.target, "Residual target ‖Sλ̄ − s‖")->capture_default_str();
    sweep->add_option("--max-iter", sw.max_iter, "Iteration cap per run (default: 10·m)");
    sweep->add_option("--threads", sw.threads, "Worker threads (default: hardware concurrency)");
    sweep->add_option("-o,--output", sw.output, "Sweep CSV output (default: stdout)");

    SpectrumArgs sp;
    auto* spectrum = app.add_subcommand("spectrum", "Report the spectrum of S");
    spectrum->add_option("--problem", sp.problem, "Problem file")->required();
    spectrum->add_option("-o,--output", sp.output, "Report output (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (generate->parsed()) return run_generate(gen);
        if (solve->parsed()) return run_solve(sol);
        if (sweep->parsed()) return run_sweep(sw);
        if (spectrum->parsed()) return run_spectrum(sp);
    } catch (const GenerationError& e) {
        std::cerr << "generation failed: " << e.what() << '\n';
        return kExitGeneration;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
