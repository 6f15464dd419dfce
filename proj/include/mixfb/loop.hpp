#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mixfb/config.hpp"
#include "mixfb/state_space.hpp"
#include "mixfb/transfer_function.hpp"

namespace mixfb {

/// Mixed controller C(s) = -[(beta(tau_n+tau_p)-tau_p) s + 2 beta - 1]
///                          / ((tau_p s + 1)(tau_n s + 1)).
/// Equals -(beta C_p - (1-beta) C_n) with first-order channels
/// C_p = 1/(tau_p s + 1), C_n = 1/(tau_n s + 1). Not minimized.
inline RationalTransferFunction controller_tf(double beta, double tau_p, double tau_n) {
    Polynomial num{-(2.0 * beta - 1.0), -(beta * (tau_n + tau_p) - tau_p)};
    Polynomial den = Polynomial{1.0, tau_p} * Polynomial{1.0, tau_n};
    return {num, den};
}

struct ControllerZero {
    double value = 0.0;
    bool finite = true;
};

/// Controller zero z_beta = (1 - 2 beta) / (beta (tau_p + tau_n) - tau_p);
/// infinite when the denominator vanishes.
inline ControllerZero controller_zero(double beta, double tau_p, double tau_n) {
    const double den = beta * (tau_p + tau_n) - tau_p;
    const double num = 1.0 - 2.0 * beta;
    if (std::abs(den) < 1e-14 * (tau_p + tau_n)) {
        return {std::numeric_limits<double>::infinity(), false};
    }
    return {num / den, true};
}

/// Unit-gain open loop G(s) = C(s) L(s); the feedback gain k is applied by
/// the closed-loop operators, never folded in here.
inline RationalTransferFunction loop_tf(const FeedbackConfig& cfg) {
    return tf_multiply(controller_tf(cfg.beta, cfg.tau_p, cfg.tau_n), cfg.load);
}

/// State-space realization of G(s) with state (x_bar, x_p, x_n): load in
/// controllable canonical form, filter states driven by -z (z the load
/// output) so that C is exactly [0 ... 0  beta  beta-1].
inline StateSpaceModel realize_loop(const FeedbackConfig& cfg) {
    if (!cfg.load.is_strictly_proper()) {
        throw std::invalid_argument("realize_loop: load must be strictly proper");
    }
    StateSpaceModel load = tf_to_statespace(cfg.load);
    const Eigen::Index m = load.order();
    const Eigen::Index n = m + 2;

    StateSpaceModel ss;
    ss.A = Matrix::Zero(n, n);
    ss.A.topLeftCorner(m, m) = load.A;
    ss.A.row(m).head(m) = -load.C / cfg.tau_p;
    ss.A(m, m) = -1.0 / cfg.tau_p;
    ss.A.row(m + 1).head(m) = -load.C / cfg.tau_n;
    ss.A(m + 1, m + 1) = -1.0 / cfg.tau_n;

    ss.B = Vector::Zero(n);
    ss.B.head(m) = load.B;

    ss.C = RowVector::Zero(n);
    ss.C(m) = cfg.beta;
    ss.C(m + 1) = cfg.beta - 1.0;

    ss.load_states = m;
    return ss;
}

/// Closed-loop vector field: x' = A x + B (r - phi(k C x)).
/// With this orientation the equilibria satisfy
/// phi(y) - r = y / (k (2 beta - 1)) and a small-signal loop gain of
/// k G(j w) = -1 marks the loss of stability.
struct ClosedLoop {
    StateSpaceModel ss;
    Nonlinearity phi;
    double k = 0.0;
    double r = 0.0;

    explicit ClosedLoop(const FeedbackConfig& cfg)
        : ss(realize_loop(cfg)), phi(cfg.phi), k(cfg.k), r(cfg.r) {}

    double output(const Vector& x) const { return k * (ss.C * x)(0); }

    Vector field(const Vector& x) const {
        return ss.A * x + ss.B * (r - phi.value(output(x)));
    }

    /// Jacobian at a state with output y: A - k phi'(y) B C.
    Matrix jacobian(double y) const {
        return ss.A - (k * phi.slope(y)) * (ss.B * ss.C);
    }
};

}  // namespace mixfb
