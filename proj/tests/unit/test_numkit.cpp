#include "helpers.hpp"

#include "symdx/error.hpp"
#include "symdx/numkit.hpp"

#include <cmath>

using namespace symdx;
using numkit::Matrix;
using test::expect_error;

namespace {

Matrix spd(std::size_t n, std::uint64_t seed)
{
    const Matrix b = test::random_matrix(n, n, seed);
    Matrix a = numkit::multiply(b.transpose(), b);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) += 1.0;
    return a;
}

double residual(const Matrix& a, std::span<const double> x, std::span<const double> b)
{
    const auto ax = numkit::multiply(a, x);
    double r = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i)
        r = std::max(r, std::abs(ax[i] - b[i]));
    return r;
}

} // namespace

TEST(Matrix, RejectsNonFiniteAndBadSize)
{
    expect_error(ErrorCode::NonFinite, [] { Matrix(1, 2, std::vector<double>{1.0, NAN}); });
    expect_error(ErrorCode::DimensionMismatch, [] { Matrix(2, 2, std::vector<double>{1.0}); });
}

TEST(Matrix, MultiplyMatchesHandProduct)
{
    const Matrix a(2, 3, {1, 2, 3, 4, 5, 6});
    const Matrix b(3, 2, {7, 8, 9, 10, 11, 12});
    EXPECT_EQ(numkit::multiply(a, b), Matrix(2, 2, {58, 64, 139, 154}));
    expect_error(ErrorCode::DimensionMismatch, [&] { numkit::multiply(a, a); });
}

TEST(SolveSpd, IdentitySystem)
{
    const std::vector<double> b{1, 2, 3};
    EXPECT_EQ(numkit::solve_spd(Matrix::identity(3), b), b);
}

TEST(SolveSpd, DiagonalSystem)
{
    const std::vector<double> d{2, 4};
    const auto x = numkit::solve_spd(Matrix::diagonal(d), std::vector<double>{2, 8});
    EXPECT_NEAR(x[0], 1.0, 1e-15);
    EXPECT_NEAR(x[1], 2.0, 1e-15);
}

TEST(SolveSpd, RandomSystemResidual)
{
    const Matrix a = spd(20, 7);
    Rng rng(8);
    std::vector<double> b(20);
    for (auto& v : b)
        v = rng.uniform(-1, 1);
    const auto x = numkit::solve_spd(a, b);
    EXPECT_LT(residual(a, x, b), 1e-10);
}

TEST(SolveSpd, FactorReusedAcrossRightHandSides)
{
    const Matrix a = spd(12, 3);
    const numkit::CholeskyFactor f(a);
    for (std::uint64_t s = 0; s < 5; ++s) {
        Rng rng(s);
        std::vector<double> b(12);
        for (auto& v : b)
            v = rng.uniform(-1, 1);
        EXPECT_LT(residual(a, f.solve(b), b), 1e-10);
    }
}

TEST(SolveSpd, Errors)
{
    expect_error(ErrorCode::NotPositiveDefinite,
                 [] { numkit::solve_spd(Matrix(2, 2, {1, 2, 2, 1}), std::vector<double>{1, 1}); });
    expect_error(ErrorCode::NonSymmetric,
                 [] { numkit::solve_spd(Matrix(2, 2, {2, 1, 0, 2}), std::vector<double>{1, 1}); });
    expect_error(ErrorCode::DimensionMismatch,
                 [] { numkit::solve_spd(Matrix::identity(2), std::vector<double>{1, 1, 1}); });
}

TEST(EigSym, Diagonal)
{
    const auto e = numkit::eig_sym(Matrix(2, 2, {1, 0, 0, 3}));
    EXPECT_NEAR(e.values[0], 3.0, 1e-14);
    EXPECT_NEAR(e.values[1], 1.0, 1e-14);
    EXPECT_NEAR(e.vectors(1, 0), 1.0, 1e-14);
    EXPECT_NEAR(e.vectors(0, 1), 1.0, 1e-14);
}

TEST(EigSym, TwoByTwoClosedForm)
{
    const auto e = numkit::eig_sym(Matrix(2, 2, {2, 1, 1, 2}));
    const double h = 1.0 / std::sqrt(2.0);
    EXPECT_NEAR(e.values[0], 3.0, 1e-13);
    EXPECT_NEAR(e.values[1], 1.0, 1e-13);
    EXPECT_NEAR(e.vectors(0, 0), h, 1e-13);
    EXPECT_NEAR(e.vectors(1, 0), h, 1e-13);
    // (1,-1)/sqrt2 with the largest-magnitude entry positive; ties go to the first.
    EXPECT_NEAR(e.vectors(0, 1), h, 1e-13);
    EXPECT_NEAR(e.vectors(1, 1), -h, 1e-13);
}

TEST(EigSym, RandomReconstructionAndOrthonormality)
{
    const Matrix b = test::random_matrix(15, 15, 11);
    Matrix a = numkit::multiply(b.transpose(), b);
    const auto e = numkit::eig_sym(a);
    const std::size_t n = a.rows();

    const Matrix vtv = numkit::multiply(e.vectors.transpose(), e.vectors);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            EXPECT_NEAR(vtv(i, j), i == j ? 1.0 : 0.0, 1e-10);

    for (std::size_t j = 0; j < n; ++j) {
        const auto v = e.vectors.column(j);
        const auto av = numkit::multiply(a, v);
        for (std::size_t i = 0; i < n; ++i)
            EXPECT_NEAR(av[i], e.values[j] * v[i], 1e-9);
    }
    for (std::size_t j = 1; j < n; ++j)
        EXPECT_GE(e.values[j - 1], e.values[j]);
}

TEST(EigSym, SumOfEigenvaluesIsTrace)
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Matrix b = test::random_matrix(9, 9, seed);
        const Matrix a = numkit::multiply(b.transpose(), b);
        double trace = 0.0, sum = 0.0;
        for (std::size_t i = 0; i < 9; ++i)
            trace += a(i, i);
        for (double v : numkit::eig_sym(a).values)
            sum += v;
        EXPECT_NEAR(sum, trace, 1e-10 * std::max(1.0, trace));
    }
}

TEST(EigSym, Deterministic)
{
    const Matrix b = test::random_matrix(10, 10, 5);
    const Matrix a = numkit::multiply(b.transpose(), b);
    const auto e1 = numkit::eig_sym(a);
    const auto e2 = numkit::eig_sym(a);
    EXPECT_EQ(e1.values, e2.values);
    EXPECT_EQ(e1.vectors, e2.vectors);
}

TEST(EigSym, RejectsNonSymmetric)
{
    expect_error(ErrorCode::NonSymmetric, [] { numkit::eig_sym(Matrix(2, 2, {1, 2, 3, 4})); });
}
