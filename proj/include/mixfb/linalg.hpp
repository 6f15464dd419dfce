#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "mixfb/polynomial.hpp"

namespace mixfb {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

inline constexpr double kRootTol = 1e-8;   // |p(root)| <= kRootTol * max|coeff|
inline constexpr double kEigTol = 1e-8;
inline constexpr double kRankTol = 1e-9;

/// All eigenvalues of a square real matrix.
inline std::vector<Complex> eigenvalues(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("eigenvalues: matrix must be square");
    }
    if (m.rows() == 0) return {};
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigenvalues: QR iteration failed to converge");
    }
    const auto& ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

inline double max_real_eigenvalue(const Matrix& m) {
    double r = -std::numeric_limits<double>::infinity();
    for (const Complex& ev : eigenvalues(m)) r = std::max(r, ev.real());
    return r;
}

/// Roots of a real polynomial as eigenvalues of its companion matrix.
inline std::vector<Complex> poly_roots(const Polynomial& p) {
    if (p.is_zero()) {
        throw std::invalid_argument("poly_roots: zero polynomial");
    }
    if (p.degree() < 1) {
        throw std::invalid_argument("poly_roots: degree must be >= 1");
    }
    const auto& c = p.coeffs();
    const auto n = static_cast<Eigen::Index>(p.degree());
    Matrix companion = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        companion(i + 1, i) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        companion(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    }
    return eigenvalues(companion);
}

/// e^{M t} by scaling-and-squaring with a diagonal Pade approximant.
inline Matrix matrix_exponential(const Matrix& m, double t = 1.0) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument("matrix_exponential: matrix must be square");
    }
    if (!std::isfinite(t)) {
        throw std::invalid_argument("matrix_exponential: t must be finite");
    }
    const Eigen::Index n = m.rows();
    if (n == 0) return Matrix(0, 0);

    Matrix x = m * t;
    const double norm = x.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
    int squarings = 0;
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        x /= std::ldexp(1.0, squarings);
    }

    // Pade(6,6): N(x)/D(x), D(x) = N(-x)
    constexpr int q = 6;
    Matrix even = Matrix::Identity(n, n);
    Matrix odd = Matrix::Zero(n, n);
    Matrix term = Matrix::Identity(n, n);
    double c = 1.0;
    for (int k = 1; k <= q; ++k) {
        c = c * static_cast<double>(q - k + 1) / static_cast<double>(k * (2 * q - k + 1));
        term = term * x;
        if (k % 2 == 0) {
            even += c * term;
        } else {
            odd += c * term;
        }
    }
    Matrix numer = even + odd;
    Matrix denom = even - odd;
    Matrix f = denom.partialPivLu().solve(numer);
    for (int i = 0; i < squarings; ++i) {
        f = f * f;
    }
    return f;
}

/// Numerical rank via singular values, threshold tol * sigma_max.
inline Eigen::Index numerical_rank(const Matrix& m, double tol = kRankTol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = tol * std::max(1.0, sv(0));
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

}  // namespace mixfb
