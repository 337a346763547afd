#include "netcg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "netcg/errors.hpp"

namespace netcg {

namespace {

void require_same_length(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": length " + std::to_string(a) +
                                " vs " + std::to_string(b));
    }
}

void require_square(const Matrix& a, const char* what) {
    if (!a.square()) {
        throw DimensionMismatch(std::string(what) + ": matrix is " + std::to_string(a.rows()) +
                                "x" + std::to_string(a.cols()));
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
    require_same_length(data_.size(), rows * cols, "Matrix");
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        require_same_length(r.size(), cols_, "Matrix row");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

Vector Matrix::column(std::size_t j) const {
    Vector c(rows_);
    for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
    return c;
}

bool Matrix::is_symmetric(double rel_tol) const {
    if (!square()) return false;
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = i + 1; j < cols_; ++j) {
            const double a = (*this)(i, j);
            if (std::abs(a - (*this)(j, i)) > rel_tol * std::max(1.0, std::abs(a))) return false;
        }
    }
    return true;
}

double Matrix::frobenius_norm() const { return norm2(data_); }

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_length(rows_, other.rows_, "Matrix +=");
    require_same_length(cols_, other.cols_, "Matrix +=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_length(rows_, other.rows_, "Matrix -=");
    require_same_length(cols_, other.cols_, "Matrix -=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double scale) {
    for (auto& v : data_) v *= scale;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(double scale, Matrix a) { return a *= scale; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    require_same_length(a.cols(), b.rows(), "Matrix product");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto ci = c.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            auto bk = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) ci[j] += aik * bk[j];
        }
    }
    return c;
}

Vector multiply(const Matrix& a, std::span<const double> x) {
    require_same_length(a.cols(), x.size(), "multiply");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Vector multiply_transposed(const Matrix& a, std::span<const double> x) {
    require_same_length(a.rows(), x.size(), "multiply_transposed");
    Vector y(a.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) axpy(x[i], a.row(i), y);
    return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "dot");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double norm2(std::span<const double> x) { return std::sqrt(dot(x, x)); }

double max_abs(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_length(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector subtract(std::span<const double> a, std::span<const double> b) {
    require_same_length(a.size(), b.size(), "subtract");
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

// ---------------------------------------------------------------------------
// Cholesky

Cholesky::Cholesky(const Matrix& a, double pivot_rel_tol) : lower_(a.rows(), a.cols()) {
    require_square(a, "Cholesky");
    const std::size_t n = a.rows();
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
    const double pivot_tol = pivot_rel_tol * scale;

    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= lower_(j, k) * lower_(j, k);
        if (!(d > pivot_tol)) {
            throw NotPositiveDefinite("Cholesky: pivot " + std::to_string(j) + " is " +
                                      std::to_string(d));
        }
        const double ljj = std::sqrt(d);
        lower_(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = a(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= lower_(i, k) * lower_(j, k);
            lower_(i, j) = v / ljj;
        }
    }
}

Vector Cholesky::solve(std::span<const double> b) const {
    const std::size_t n = dim();
    require_same_length(b.size(), n, "Cholesky::solve");
    Vector x(b.begin(), b.end());
    for (std::size_t i = 0; i < n; ++i) {
        double v = x[i];
        for (std::size_t k = 0; k < i; ++k) v -= lower_(i, k) * x[k];
        x[i] = v / lower_(i, i);
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = x[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= lower_(k, i) * x[k];
        x[i] = v / lower_(i, i);
    }
    return x;
}

Matrix Cholesky::solve(const Matrix& b) const {
    require_same_length(b.rows(), dim(), "Cholesky::solve");
    Matrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const Vector col = solve(b.column(j));
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
    }
    return x;
}

Matrix Cholesky::inverse() const { return solve(Matrix::identity(dim())); }

Vector solve_spd(const Matrix& a, std::span<const double> b) {
    if (!a.is_symmetric()) throw InvalidArgument("solve_spd: matrix is not symmetric");
    return Cholesky(a).solve(b);
}

// ---------------------------------------------------------------------------
// LU

Lu::Lu(const Matrix& a, double pivot_rel_tol) : lu_(a), perm_(a.rows()) {
    require_square(a, "Lu");
    const std::size_t n = a.rows();
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});
    const double pivot_tol = pivot_rel_tol * std::max(max_abs(a.data()), 1e-300);

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu_(i, k)) > std::abs(lu_(piv, k))) piv = i;
        if (!(std::abs(lu_(piv, k)) > pivot_tol)) {
            throw SingularMatrix("Lu: pivot " + std::to_string(k) + " vanished");
        }
        if (piv != k) {
            std::swap(perm_[k], perm_[piv]);
            for (std::size_t j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu_(i, k) / lu_(k, k);
            lu_(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
        }
    }
}

Vector Lu::solve(std::span<const double> b) const {
    const std::size_t n = dim();
    require_same_length(b.size(), n, "Lu::solve");
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = b[perm_[i]];
        for (std::size_t k = 0; k < i; ++k) v -= lu_(i, k) * x[k];
        x[i] = v;
    }
    for (std::size_t i = n; i-- > 0;) {
        double v = x[i];
        for (std::size_t k = i + 1; k < n; ++k) v -= lu_(i, k) * x[k];
        x[i] = v / lu_(i, i);
    }
    return x;
}

Matrix Lu::solve(const Matrix& b) const {
    require_same_length(b.rows(), dim(), "Lu::solve");
    Matrix x(b.rows(), b.cols());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        const Vector col = solve(b.column(j));
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = col[i];
    }
    return x;
}

// ---------------------------------------------------------------------------
// Symmetric eigenproblem

EigenDecomposition eigen_decompose(const Matrix& input, int max_sweeps) {
    require_square(input, "eigen_decompose");
    if (input.rows() == 0) throw DimensionMismatch("eigen_decompose: empty matrix");
    const std::size_t n = input.rows();

    // Symmetrize so tiny asymmetries from assembly do not bias rotations.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (input(i, j) + input(j, i));
    Matrix v = Matrix::identity(n);

    const double total = a.frobenius_norm();
    auto off_diagonal = [&] {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        return std::sqrt(2.0 * off);
    };

    bool converged = total == 0.0;
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        if (off_diagonal() <= 1e-15 * total) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(q, q);
                // Skip rotations that cannot change the diagonal in working precision.
                if (sweep > 3 && std::abs(apq) < 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                auto rp = a.row(p);
                auto rq = a.row(q);
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = rp[k];
                    const double aqk = rq[k];
                    rp[k] = c * apk - s * aqk;
                    rq[k] = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged && off_diagonal() > 1e-15 * total) {
        throw NoConvergence("eigen_decompose: no convergence after " + std::to_string(max_sweeps) +
                            " sweeps");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

    EigenDecomposition out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    }
    return out;
}

double default_zero_tol(std::span<const double> eigenvalues) {
    return 1e-9 * max_abs(eigenvalues);
}

SpectralStats spectral_stats(std::span<const double> eigenvalues, std::optional<double> zero_tol) {
    SpectralStats st;
    st.eigenvalues.assign(eigenvalues.begin(), eigenvalues.end());
    std::sort(st.eigenvalues.begin(), st.eigenvalues.end());
    st.zero_tol = zero_tol.value_or(default_zero_tol(st.eigenvalues));

    double lo = 0.0;
    double hi = 0.0;
    for (double w : st.eigenvalues) {
        if (std::abs(w) <= st.zero_tol) {
            ++st.num_zero;
            continue;
        }
        ++st.rank;
        const double aw = std::abs(w);
        if (lo == 0.0 || aw < lo) lo = aw;
        hi = std::max(hi, aw);
    }
    st.omega_min_nonzero = lo;
    st.omega_max = hi;
    st.kappa = st.rank == 0 ? 1.0 : hi / lo;
    return st;
}

SpectralStats symmetric_eigen(const Matrix& a, std::optional<double> zero_tol) {
    return spectral_stats(eigen_decompose(a).values, zero_tol);
}

double semi_norm(const Matrix& w, std::span<const double> x) {
    require_square(w, "semi_norm");
    require_same_length(w.cols(), x.size(), "semi_norm");
    const double q = dot(x, multiply(w, x));
    if (q < -1e-12) {
        throw NotPositiveSemidefinite("semi_norm: xᵀWx = " + std::to_string(q));
    }
    return q <= 0.0 ? 0.0 : std::sqrt(q);
}

namespace {

Matrix select_basis(const Matrix& s, std::optional<double> zero_tol, bool want_range) {
    const EigenDecomposition eig = eigen_decompose(s);
    const double tol = zero_tol.value_or(default_zero_tol(eig.values));
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < eig.values.size(); ++k) {
        const bool nonzero = std::abs(eig.values[k]) > tol;
        if (nonzero == want_range) keep.push_back(k);
    }
    Matrix q(s.rows(), keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c)
        for (std::size_t i = 0; i < s.rows(); ++i) q(i, c) = eig.vectors(i, keep[c]);
    return q;
}

}  // namespace

Matrix range_basis(const Matrix& s, std::optional<double> zero_tol) {
    return select_basis(s, zero_tol, true);
}

Matrix null_basis(const Matrix& s, std::optional<double> zero_tol) {
    return select_basis(s, zero_tol, false);
}

Vector range_space_solve(const Matrix& s, std::span<const double> b,
                         std::optional<double> zero_tol) {
    require_same_length(s.rows(), b.size(), "range_space_solve");
    const Matrix q = range_basis(s, zero_tol);
    if (q.cols() == 0) return Vector(s.rows(), 0.0);
    const Matrix qt = q.transpose();
    Matrix reduced = qt * s * q;
    // Symmetrize against roundoff before factorizing.
    for (std::size_t i = 0; i < reduced.rows(); ++i)
        for (std::size_t j = i + 1; j < reduced.cols(); ++j)
            reduced(i, j) = reduced(j, i) = 0.5 * (reduced(i, j) + reduced(j, i));
    const Vector coeffs = Cholesky(reduced).solve(multiply(qt, b));
    return multiply(q, coeffs);
}

}  // namespace netcg
