#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace symdx::numkit {

/// Dense row-major matrix of finite doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Throws DimensionMismatch if data.size() != rows*cols, NonFinite on NaN/Inf.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }
    bool square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::vector<double> column(std::size_t c) const;
    Matrix transpose() const;
    Matrix select_rows(std::span<const std::size_t> indices) const;
    Matrix select_cols(std::span<const std::size_t> indices) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix multiply(const Matrix& a, const Matrix& b);
std::vector<double> multiply(const Matrix& a, std::span<const double> x);
double frobenius_norm(const Matrix& a);
double max_abs(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
bool is_symmetric(const Matrix& a, double tol = 1e-10);

/// Cholesky factor of a symmetric positive-definite matrix, reusable across
/// right-hand sides.
class CholeskyFactor {
public:
    /// Throws NotPositiveDefinite, NonSymmetric or DimensionMismatch.
    explicit CholeskyFactor(const Matrix& a);
    ~CholeskyFactor();
    CholeskyFactor(CholeskyFactor&&) noexcept;
    CholeskyFactor& operator=(CholeskyFactor&&) noexcept;

    std::size_t size() const noexcept;
    std::vector<double> solve(std::span<const double> b) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b);

struct EigenDecomposition {
    std::vector<double> values; // descending
    Matrix vectors;             // column j pairs with values[j]
};

/// Cyclic Jacobi eigensolver. Each eigenvector's largest-magnitude entry is
/// made positive so the output is unique up to repeated eigenvalues.
EigenDecomposition eig_sym(const Matrix& a);

} // namespace symdx::numkit
