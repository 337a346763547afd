#pragma once

// Small dense linear algebra kernel. Everything here is value-semantic and
// free of global state; matrices are row-major.

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

namespace netcg {

using Vector = std::vector<double>;

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

    const std::vector<double>& data() const noexcept { return data_; }

    Matrix transpose() const;
    Vector column(std::size_t j) const;

    /// |A(i,j) - A(j,i)| <= rel_tol * max(1, |A(i,j)|) for all i, j.
    bool is_symmetric(double rel_tol = 1e-12) const;

    double frobenius_norm() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double scale);

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator*(double scale, Matrix a);

/// y = A x
Vector multiply(const Matrix& a, std::span<const double> x);
/// y = Aᵀ x
Vector multiply_transposed(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> x);
double max_abs(std::span<const double> x);
/// y += alpha x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
Vector subtract(std::span<const double> a, std::span<const double> b);

/// Cholesky factorization A = L Lᵀ of a symmetric positive-definite matrix.
/// Reusable for any number of right-hand sides.
class Cholesky {
public:
    /// Throws NotPositiveDefinite when a pivot drops to or below
    /// `pivot_rel_tol * max_i |A(i,i)|`.
    explicit Cholesky(const Matrix& a, double pivot_rel_tol = 1e-13);

    std::size_t dim() const noexcept { return lower_.rows(); }
    Vector solve(std::span<const double> b) const;
    Matrix solve(const Matrix& b) const;
    Matrix inverse() const;

private:
    Matrix lower_;
};

/// LU factorization with partial pivoting for general square matrices
/// (used on indefinite KKT blocks).
class Lu {
public:
    explicit Lu(const Matrix& a, double pivot_rel_tol = 1e-13);

    std::size_t dim() const noexcept { return lu_.rows(); }
    Vector solve(std::span<const double> b) const;
    Matrix solve(const Matrix& b) const;

private:
    Matrix lu_;
    std::vector<std::size_t> perm_;
};

Vector solve_spd(const Matrix& a, std::span<const double> b);

/// Full eigendecomposition of a symmetric matrix.
struct EigenDecomposition {
    Vector values;   ///< ascending
    Matrix vectors;  ///< column k belongs to values[k]
};

/// Cyclic Jacobi rotations. Throws NoConvergence when the off-diagonal mass
/// does not vanish within `max_sweeps`.
EigenDecomposition eigen_decompose(const Matrix& a, int max_sweeps = 100);

struct SpectralStats {
    Vector eigenvalues;  ///< ascending
    double omega_min_nonzero = 0.0;
    double omega_max = 0.0;
    double kappa = 1.0;
    std::size_t num_zero = 0;
    std::size_t rank = 0;
    double zero_tol = 0.0;
};

/// Zero threshold used when the caller supplies none: 1e-9 · max|ω|.
double default_zero_tol(std::span<const double> eigenvalues);

/// Eigenvalues with |ω| <= zero_tol count as zero. `zero_tol` defaults to
/// default_zero_tol().
SpectralStats spectral_stats(std::span<const double> eigenvalues,
                             std::optional<double> zero_tol = std::nullopt);
SpectralStats symmetric_eigen(const Matrix& a, std::optional<double> zero_tol = std::nullopt);

/// √(xᵀWx). Quadratic forms in [-1e-12, 0) clamp to zero; anything more
/// negative throws NotPositiveSemidefinite.
double semi_norm(const Matrix& w, std::span<const double> x);

/// Orthonormal basis of span{v : Sv = ωv, ω > zero_tol} as columns.
Matrix range_basis(const Matrix& s, std::optional<double> zero_tol = std::nullopt);
/// Orthonormal basis of the numerical kernel (complement of range_basis).
Matrix null_basis(const Matrix& s, std::optional<double> zero_tol = std::nullopt);

/// Solution of S x = b restricted to range(S): x = Q (QᵀSQ)⁻¹ Qᵀ b.
/// Independent of any Krylov iteration, so usable as a reference.
Vector range_space_solve(const Matrix& s, std::span<const double> b,
                         std::optional<double> zero_tol = std::nullopt);

}  // namespace netcg
