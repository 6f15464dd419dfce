#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "mixfb/linalg.hpp"
#include "mixfb/transfer_function.hpp"

namespace mixfb {

/// Minimal SISO realization (A, B, C). When built by `realize_loop` the
/// first `load_states` entries are the load states x_bar, followed by the
/// controller filter states (x_p, x_n).
struct StateSpaceModel {
    Matrix A;
    Vector B;
    RowVector C;
    Eigen::Index load_states = 0;

    Eigen::Index order() const { return A.rows(); }

    /// C (sI - A)^{-1} B
    Complex evaluate(const Complex& s) const {
        const Eigen::Index n = order();
        Eigen::MatrixXcd m = -A.cast<Complex>();
        for (Eigen::Index i = 0; i < n; ++i) m(i, i) += s;
        Eigen::VectorXcd x = m.partialPivLu().solve(B.cast<Complex>());
        return (C.cast<Complex>() * x)(0);
    }

    Matrix controllability_matrix() const {
        const Eigen::Index n = order();
        Matrix ctrb(n, n);
        Vector col = B;
        for (Eigen::Index i = 0; i < n; ++i) {
            ctrb.col(i) = col;
            col = A * col;
        }
        return ctrb;
    }

    Matrix observability_matrix() const {
        const Eigen::Index n = order();
        Matrix obsv(n, n);
        RowVector row = C;
        for (Eigen::Index i = 0; i < n; ++i) {
            obsv.row(i) = row;
            row = row * A;
        }
        return obsv;
    }

    bool is_minimal(double tol = kRankTol) const {
        const Eigen::Index n = order();
        return numerical_rank(controllability_matrix(), tol) == n &&
               numerical_rank(observability_matrix(), tol) == n;
    }
};

/// Controllable canonical realization of a strictly proper transfer function.
inline StateSpaceModel tf_to_statespace(const RationalTransferFunction& g) {
    if (!g.is_strictly_proper()) {
        throw std::invalid_argument("tf_to_statespace: transfer function must be strictly proper");
    }
    const auto n = static_cast<Eigen::Index>(g.den().degree());
    const double lead = g.den().leading();

    StateSpaceModel ss;
    ss.A = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
        ss.A(i, i + 1) = 1.0;
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        ss.A(n - 1, i) = -g.den().coeffs()[static_cast<std::size_t>(i)] / lead;
    }
    ss.B = Vector::Zero(n);
    ss.B(n - 1) = 1.0;
    ss.C = RowVector::Zero(n);
    for (std::size_t i = 0; i < g.num().coeffs().size(); ++i) {
        ss.C(static_cast<Eigen::Index>(i)) = g.num().coeffs()[i] / lead;
    }
    ss.load_states = n;
    return ss;
}

}  // namespace mixfb
