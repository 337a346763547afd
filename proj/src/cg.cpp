#include "netcg/cg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "netcg/errors.hpp"

namespace netcg {

double contraction_factor(double kappa) {
    if (!(kappa >= 1.0)) throw InvalidKappa("kappa must be >= 1, got " + std::to_string(kappa));
    const double root = std::sqrt(kappa);
    return (root - 1.0) / (root + 1.0);
}

double convergence_bound(double kappa, double initial_sq_error, std::size_t n) {
    const double c = contraction_factor(kappa);
    if (initial_sq_error < 0.0) throw InvalidArgument("convergence_bound: negative initial error");
    return 2.0 * std::pow(c, static_cast<double>(n)) * initial_sq_error;
}

SpectralStats spectral_stats_of(const Matrix& s, std::optional<double> zero_tol) {
    return symmetric_eigen(s, zero_tol);
}

CgOperator dense_operator(const Matrix& s) {
    if (!s.square()) throw DimensionMismatch("dense_operator: S must be square");
    CgOperator op;
    op.dim = s.rows();
    op.apply = [&s](std::span<const double> x) { return multiply(s, x); };
    op.seminorm = [&s](std::span<const double> x) { return semi_norm(s, x); };
    return op;
}

CgResult cg_solve(const Matrix& s, std::span<const double> rhs, std::span<const double> lambda0,
                  const CgOptions& options) {
    if (!s.square()) throw DimensionMismatch("cg_solve: S must be square");
    return cg_solve(dense_operator(s), rhs, lambda0, options);
}

CgResult cg_solve(const CgOperator& op, std::span<const double> rhs, std::span<const double> lambda0,
                  const CgOptions& options) {
    const std::size_t m = op.dim;
    if (!op.apply) throw InvalidArgument("cg_solve: operator has no apply");
    if (rhs.size() != m || lambda0.size() != m) {
        throw DimensionMismatch("cg_solve: S, s and λ⁰ disagree");
    }
    if (options.max_iter == 0) throw InvalidArgument("cg_solve: max_iter must be >= 1");
    if (options.reference_solution && !op.seminorm) {
        throw InvalidArgument("cg_solve: reference solution given but operator has no seminorm");
    }

    auto residual_sq = [&](std::span<const double> x) {
        return op.residual_sq ? op.residual_sq(x) : dot(x, x);
    };
    auto curvature_of = [&](std::span<const double> p, std::span<const double> sp) {
        return op.curvature ? op.curvature(p, sp) : dot(p, sp);
    };

    CgResult out;
    out.trace.method = "cg";

    Vector lambda(lambda0.begin(), lambda0.end());
    Vector r = op.initial_residual ? op.initial_residual(rhs, lambda) : subtract(rhs, op.apply(lambda));
    if (r.size() != m) throw DimensionMismatch("cg_solve: operator returned a wrong-sized residual");
    Vector p = r;
    double eta = residual_sq(r);

    std::optional<double> e0_sq;
    auto record = [&](std::size_t n, double alpha, double beta) {
        IterationRecord rec;
        rec.iter = n;
        rec.residual_norm = std::sqrt(std::max(0.0, eta));
        if (options.reference_solution) {
            rec.seminorm_error = op.seminorm(subtract(lambda, *options.reference_solution));
            if (n == 0) e0_sq = *rec.seminorm_error * *rec.seminorm_error;
        }
        if (options.kappa && e0_sq) {
            rec.bound = std::sqrt(n == 0 ? *e0_sq : convergence_bound(*options.kappa, *e0_sq, n - 1));
        }
        rec.alpha = alpha;
        rec.beta = beta;
        out.trace.records.push_back(rec);
        if (options.record_vectors) {
            out.iterates.push_back(lambda);
            out.residuals.push_back(r);
            out.directions.push_back(p);
        }
    };

    record(0, 0.0, 0.0);
    const double tol_sq = options.tol * options.tol;
    std::size_t n = 0;
    while (eta > tol_sq) {
        if (n == options.max_iter) {
            out.status = SolveStatus::MaxIterations;
            break;
        }
        const Vector sp = op.apply(p);
        const double curvature = curvature_of(p, sp);
        if (curvature <= 1e-14 * dot(p, p)) {
            throw BreakdownZeroCurvature("cg_solve: pᵀSp = " + std::to_string(curvature) +
                                         " at iteration " + std::to_string(n));
        }
        const double alpha = eta / curvature;
        axpy(alpha, p, lambda);
        axpy(-alpha, sp, r);
        const double eta_next = residual_sq(r);
        const double beta = eta_next / eta;
        for (std::size_t k = 0; k < m; ++k) p[k] = r[k] + beta * p[k];
        eta = eta_next;
        ++n;
        record(n, alpha, beta);
    }

    out.solution = std::move(lambda);
    return out;
}

}  // namespace netcg
