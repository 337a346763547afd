#pragma once

// File formats shared by the CLI and the plotting scripts.
//
// Problem file (JSON):
//   { "m": int,
//     "topology": {"nodes": int, "edges": [[i, j], ...]},
//     "ntheta": int,
//     "agents": [ {"id": int, "support": [int, ...],
//                  "S_hat": [row-major floats], "s_hat": [floats]} ],
//     "lambda_star": [floats],           (optional)
//     "theta_star": [floats],            (optional)
//     "meta": {"seed": int, "kind": str, "noise_var": float, "ny": int,
//              "edges": int, "rank": int, "num_zero": int, "kappa": float} }
// Spectral meta fields are present only when the spectrum was computed.
//
// Trace CSV: iter,residual_norm,seminorm_error,bound,global_sums,neighbor_msgs,rounds
// Sweep CSV: method,rho,iterations,final_residual,hit_cap

#include <iosfwd>
#include <string>
#include <vector>

#include "netcg/dadmm.hpp"
#include "netcg/problems.hpp"
#include "netcg/trace.hpp"

namespace netcg {

std::string problem_to_json(const NetworkProblem& problem);
/// Throws InvalidArgument on schema violations.
NetworkProblem problem_from_json(const std::string& text);

void save_problem(const std::string& path, const NetworkProblem& problem);
NetworkProblem load_problem(const std::string& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

void write_trace_csv(std::ostream& os, const ConvergenceTrace& trace);

struct SweepReference {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool hit_cap = false;
};

void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points,
                     const SweepReference& dcg_reference);

}  // namespace netcg
