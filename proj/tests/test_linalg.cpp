#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"

using namespace mixfb;
using Catch::Matchers::WithinAbs;

TEST_CASE("poly_roots recovers the two-mass load poles") {
    auto roots = poly_roots(Polynomial{200.0, 20.0, 1.0});
    REQUIRE(testutil::match_distance(roots, {{-10.0, 10.0}, {-10.0, -10.0}}) < 1e-9);
}

TEST_CASE("poly_roots linear factor and error paths") {
    auto roots = poly_roots(Polynomial{1.0, 1.0});
    REQUIRE(roots.size() == 1);
    REQUIRE_THAT(roots[0].real(), WithinAbs(-1.0, 1e-12));

    REQUIRE_THROWS_AS(poly_roots(Polynomial{0.0}), std::invalid_argument);
    REQUIRE_THROWS_AS(poly_roots(Polynomial{3.0}), std::invalid_argument);
}

TEST_CASE("poly_roots residual bound on random polynomials") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> coeff(-3.0, 3.0);
    for (int trial = 0; trial < 25; ++trial) {
        std::vector<double> c(6);
        for (double& x : c) x = coeff(rng);
        if (std::abs(c.back()) < 0.1) c.back() = 1.0;
        Polynomial p(c);
        for (const Complex& r : poly_roots(p)) {
            REQUIRE(std::abs(p.evaluate(r)) <= kRootTol * p.max_abs_coeff() * 10.0);
            REQUIRE(std::abs(p.evaluate(r)) < 1e-8);
        }
    }
}

TEST_CASE("matrix exponential basics") {
    REQUIRE((matrix_exponential(Matrix::Zero(3, 3), 1.0) - Matrix::Identity(3, 3)).norm() == 0.0);

    Matrix n(2, 2);
    n << 0.0, 1.0, 0.0, 0.0;
    Matrix e = matrix_exponential(n, 1.0);
    REQUIRE_THAT(e(0, 0), WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(e(0, 1), WithinAbs(1.0, 1e-14));
    REQUIRE_THAT(e(1, 0), WithinAbs(0.0, 1e-14));
    REQUIRE_THAT(e(1, 1), WithinAbs(1.0, 1e-14));

    REQUIRE_THROWS_AS(matrix_exponential(Matrix::Zero(2, 3), 1.0), std::invalid_argument);
}

TEST_CASE("matrix exponential matches a truncated Taylor series") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix m(4, 4);
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) m(i, j) = entry(rng);
        }
        m *= 2.0 / std::max(1.0, m.norm());
        Matrix e = matrix_exponential(m, 1.0);
        Matrix oracle = testutil::taylor_expm(m, 1.0, 60);
        REQUIRE((e - oracle).norm() < 1e-9 * std::max(1.0, oracle.norm()));
    }
}

TEST_CASE("matrix exponential semigroup and Liouville properties") {
    std::mt19937 rng(13);
    std::uniform_real_distribution<double> entry(-1.0, 1.0);
    std::uniform_real_distribution<double> time(0.0, 5.0);
    for (int trial = 0; trial < 8; ++trial) {
        Matrix m(5, 5);
        for (int i = 0; i < 5; ++i) {
            for (int j = 0; j < 5; ++j) m(i, j) = entry(rng);
        }
        m -= (m.eigenvalues().real().maxCoeff() + 0.2) * Matrix::Identity(5, 5);
        const double t1 = time(rng), t2 = time(rng);

        Matrix lhs = matrix_exponential(m, t1 + t2);
        Matrix rhs = matrix_exponential(m, t1) * matrix_exponential(m, t2);
        REQUIRE((lhs - rhs).norm() < 1e-8 * std::max(1.0, lhs.norm()));

        const double det = matrix_exponential(m, t1).determinant();
        const double expected = std::exp(m.trace() * t1);
        REQUIRE_THAT(det, WithinAbs(expected, 1e-8 * std::max(1.0, std::abs(expected))));
    }
}

TEST_CASE("eigenvalues of the load companion matrix") {
    Matrix companion(2, 2);
    companion << 0.0, -200.0, 1.0, -20.0;
    REQUIRE(testutil::match_distance(eigenvalues(companion), {{-10.0, 10.0}, {-10.0, -10.0}}) <
            1e-9);

    auto ident = eigenvalues(Matrix::Identity(4, 4));
    for (const Complex& ev : ident) {
        REQUIRE_THAT(ev.real(), WithinAbs(1.0, 1e-12));
        REQUIRE_THAT(ev.imag(), WithinAbs(0.0, 1e-12));
    }
}

TEST_CASE("eigenvalues match a Jacobi-rotation oracle on symmetric matrices") {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> entry(-2.0, 2.0);
    for (int trial = 0; trial < 6; ++trial) {
        Matrix m(5, 5);
        for (int i = 0; i < 5; ++i) {
            for (int j = i; j < 5; ++j) {
                m(i, j) = entry(rng);
                m(j, i) = m(i, j);
            }
        }
        std::vector<double> oracle = testutil::jacobi_eigenvalues(m);
        std::vector<double> got;
        for (const Complex& ev : eigenvalues(m)) got.push_back(ev.real());
        std::sort(got.begin(), got.end());
        for (std::size_t i = 0; i < got.size(); ++i) {
            REQUIRE_THAT(got[i], WithinAbs(oracle[i], 1e-8));
        }
    }
}
