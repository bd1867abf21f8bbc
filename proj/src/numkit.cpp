#include "symdx/numkit.hpp"

#include "symdx/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace symdx::numkit {

namespace {

void require_finite(std::span<const double> values)
{
    for (double v : values)
        if (!std::isfinite(v))
            fail(ErrorCode::NonFinite, "matrix contains NaN or Inf");
}

std::string shape(const Matrix& m)
{
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_symmetric(const Matrix& a)
{
    if (!a.square())
        fail(ErrorCode::DimensionMismatch, "expected a square matrix, got " + shape(a));
    if (!is_symmetric(a))
        fail(ErrorCode::NonSymmetric, "matrix is not symmetric within 1e-10");
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
    if (!std::isfinite(fill))
        fail(ErrorCode::NonFinite, "matrix fill value is not finite");
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows * cols)
        fail(ErrorCode::DimensionMismatch,
             "data length " + std::to_string(data_.size()) + " does not match " +
                 std::to_string(rows) + "x" + std::to_string(cols));
    require_finite(data_);
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values)
{
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i)
        m(i, i) = values[i];
    return m;
}

std::vector<double> Matrix::column(std::size_t c) const
{
    std::vector<double> out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const
{
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        auto src = row(indices[i]);
        std::copy(src.begin(), src.end(), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::select_cols(std::span<const std::size_t> indices) const
{
    Matrix out(rows_, indices.size());
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t j = 0; j < indices.size(); ++j)
            out(r, j) = (*this)(r, indices[j]);
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        fail(ErrorCode::DimensionMismatch, "cannot multiply " + shape(a) + " by " + shape(b));
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0)
                continue;
            auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                dst[j] += aik * src[j];
        }
    }
    return out;
}

std::vector<double> multiply(const Matrix& a, std::span<const double> x)
{
    if (a.cols() != x.size())
        fail(ErrorCode::DimensionMismatch, "vector length " + std::to_string(x.size()) +
                                               " does not match " + shape(a));
    std::vector<double> out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        out[i] = dot(a.row(i), x);
    return out;
}

double frobenius_norm(const Matrix& a)
{
    double sum = 0.0;
    for (double v : a.data())
        sum += v * v;
    return std::sqrt(sum);
}

double max_abs(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v)
        m = std::max(m, std::abs(x));
    return m;
}

double dot(std::span<const double> a, std::span<const double> b)
{
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

bool is_symmetric(const Matrix& a, double tol)
{
    if (!a.square())
        return false;
    const double scale = std::max(1.0, max_abs(a.data()));
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = i + 1; j < a.cols(); ++j)
            if (std::abs(a(i, j) - a(j, i)) > tol * scale)
                return false;
    return true;
}

struct CholeskyFactor::Impl {
    Eigen::LLT<Eigen::MatrixXd> llt;
};

CholeskyFactor::CholeskyFactor(const Matrix& a) : impl_(std::make_unique<Impl>())
{
    require_symmetric(a);
    const auto n = static_cast<Eigen::Index>(a.rows());
    // Row-major storage of a symmetric matrix reads identically as column-major.
    Eigen::Map<const Eigen::MatrixXd> view(a.data().data(), n, n);
    impl_->llt.compute(view);
    if (impl_->llt.info() != Eigen::Success)
        fail(ErrorCode::NotPositiveDefinite, "non-positive pivot during Cholesky factorization");
}

CholeskyFactor::~CholeskyFactor() = default;
CholeskyFactor::CholeskyFactor(CholeskyFactor&&) noexcept = default;
CholeskyFactor& CholeskyFactor::operator=(CholeskyFactor&&) noexcept = default;

std::size_t CholeskyFactor::size() const noexcept
{
    return static_cast<std::size_t>(impl_->llt.rows());
}

std::vector<double> CholeskyFactor::solve(std::span<const double> b) const
{
    if (b.size() != size())
        fail(ErrorCode::DimensionMismatch, "right-hand side length " + std::to_string(b.size()) +
                                               " does not match system size " +
                                               std::to_string(size()));
    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(b.size()));
    Eigen::VectorXd x = impl_->llt.solve(rhs);
    return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_spd(const Matrix& a, std::span<const double> b)
{
    if (a.rows() != b.size())
        fail(ErrorCode::DimensionMismatch, "right-hand side length " + std::to_string(b.size()) +
                                               " does not match " + shape(a));
    return CholeskyFactor(a).solve(b);
}

EigenDecomposition eig_sym(const Matrix& input)
{
    require_symmetric(input);
    const std::size_t n = input.rows();
    constexpr int max_sweeps = 100;
    constexpr double off_tolerance = 1e-12;

    Matrix a = input;
    Matrix v = Matrix::identity(n);
    const double norm = frobenius_norm(a);

    auto off_norm = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < max_sweeps && off_norm() > off_tolerance * norm; ++sweep) {
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0)
                    continue;
                const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = 0.0;
                a(q, p) = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    EigenDecomposition out{std::vector<double>(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        std::size_t pivot = 0;
        for (std::size_t k = 1; k < n; ++k)
            if (std::abs(v(k, src)) > std::abs(v(pivot, src)))
                pivot = k;
        const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t k = 0; k < n; ++k)
            out.vectors(k, j) = sign * v(k, src);
    }
    return out;
}

} // namespace symdx::numkit
