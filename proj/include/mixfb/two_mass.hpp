#pragma once

#include <cmath>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mixfb/config.hpp"
#include "mixfb/format.hpp"
#include "mixfb/simulate.hpp"
#include "mixfb/transfer_function.hpp"

namespace mixfb {

/// Two carts coupled by a spring-damper pair, driven by an internal
/// actuator force and braked by direction-dependent ground friction.
struct TwoMassParams {
    double k_m = 100.0;     // elastic coefficient (normalized)
    double d_m = 10.0;      // damping coefficient
    double gamma = 100.0;   // actuator force scale
    double f_plus = 5.0;    // forward friction level
    double f_minus = -20.0; // backward friction level
    double eps = 1e-2;      // friction smoothing velocity scale
};

/// Load seen by the controller: the relative coordinate w = x1 - x2 obeys
/// w'' = -2 k_m w - 2 d_m w' + 2 gamma F, so L(s) = 2 gamma / (s^2 + 2 d_m s + 2 k_m).
inline RationalTransferFunction load_tf(const TwoMassParams& p) {
    if (!(p.k_m > 0.0) || !(p.d_m > 0.0) || !(p.gamma > 0.0)) {
        throw std::invalid_argument("load_tf: k_m, d_m, gamma must be positive");
    }
    return {Polynomial{2.0 * p.gamma}, Polynomial{2.0 * p.k_m, 2.0 * p.d_m, 1.0}};
}

/// Smooth stand-in for the discontinuous friction law (f_plus for v > 0,
/// f_minus for v < 0, 0 at rest): with t = tanh(v / eps),
/// f(v) = (f_plus - f_minus)/2 t + (f_plus + f_minus)/2 t^2.
inline double friction_force(double v, const TwoMassParams& p) {
    const double t = std::tanh(v / p.eps);
    return 0.5 * (p.f_plus - p.f_minus) * t + 0.5 * (p.f_plus + p.f_minus) * t * t;
}

struct LocomotionTrace {
    std::vector<double> t;
    std::vector<double> x1, v1, x2, v2;
    std::vector<double> w;    // x1 - x2
    std::vector<double> y;    // controller output fed to the sigmoid
    std::vector<double> com;  // (x1 + x2) / 2
    double dt = 0.0;
};

/// Full nonlinear closed loop: 6 states (x1, v1, x2, v2, x_p, x_n) under
/// RK4, with actuator force F = r - phi(y), y = k (beta x_p + (beta-1) x_n)
/// and the filters driven by -w, matching the realization used everywhere
/// else (so the friction-free w dynamics reduce exactly to `simulate`).
inline LocomotionTrace simulate_locomotion(const TwoMassParams& p, const FeedbackConfig& ctrl,
                                           bool friction_on, double T, double dt,
                                           double w0 = 1e-2) {
    if (!(T > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("simulate_locomotion: T and dt must be positive");
    }
    const double k = ctrl.k;
    const double beta = ctrl.beta;
    const Nonlinearity phi = ctrl.phi;

    auto deriv = [&](const double* s, double* ds) {
        const double w = s[0] - s[2];
        const double vw = s[1] - s[3];
        const double y = k * (beta * s[4] + (beta - 1.0) * s[5]);
        const double force = p.gamma * (ctrl.r - phi.value(y));
        double a1 = -p.k_m * w - p.d_m * vw + force;
        double a2 = p.k_m * w + p.d_m * vw - force;
        if (friction_on) {
            a1 -= friction_force(s[1], p);
            a2 -= friction_force(s[3], p);
        }
        ds[0] = s[1];
        ds[1] = a1;
        ds[2] = s[3];
        ds[3] = a2;
        ds[4] = (-w - s[4]) / ctrl.tau_p;
        ds[5] = (-w - s[5]) / ctrl.tau_n;
    };

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    LocomotionTrace tr;
    tr.dt = dt;
    tr.t.reserve(steps + 1);

    double s[6] = {0.5 * w0, 0.0, -0.5 * w0, 0.0, 0.0, 0.0};
    double k1[6], k2[6], k3[6], k4[6], tmp[6];
    for (std::size_t i = 0; i <= steps; ++i) {
        for (double v : s) {
            if (std::abs(v) > 1e6) {
                throw std::runtime_error("simulate_locomotion: state diverged");
            }
        }
        tr.t.push_back(static_cast<double>(i) * dt);
        tr.x1.push_back(s[0]);
        tr.v1.push_back(s[1]);
        tr.x2.push_back(s[2]);
        tr.v2.push_back(s[3]);
        tr.w.push_back(s[0] - s[2]);
        tr.y.push_back(k * (beta * s[4] + (beta - 1.0) * s[5]));
        tr.com.push_back(0.5 * (s[0] + s[2]));
        if (i == steps) break;

        deriv(s, k1);
        for (int j = 0; j < 6; ++j) tmp[j] = s[j] + 0.5 * dt * k1[j];
        deriv(tmp, k2);
        for (int j = 0; j < 6; ++j) tmp[j] = s[j] + 0.5 * dt * k2[j];
        deriv(tmp, k3);
        for (int j = 0; j < 6; ++j) tmp[j] = s[j] + dt * k3[j];
        deriv(tmp, k4);
        for (int j = 0; j < 6; ++j) {
            s[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    return tr;
}

/// Center-of-mass displacement over the final `window` seconds, evaluated
/// after the first half of the trace is discarded as transient.
inline double net_displacement(const LocomotionTrace& tr, double window) {
    if (tr.t.empty()) {
        throw std::invalid_argument("net_displacement: empty trace");
    }
    const double t_end = tr.t.back();
    const double t_start = t_end - window;
    if (!(window > 0.0) || t_start < 0.5 * t_end - 1e-12) {
        throw std::invalid_argument("net_displacement: window must fit in the settled half of the trace");
    }
    std::size_t idx = tr.t.size() - 1;
    while (idx > 0 && tr.t[idx - 1] >= t_start) --idx;
    return tr.com.back() - tr.com[idx];
}

inline void write_csv(const LocomotionTrace& tr, std::ostream& os) {
    os << "t,x1,x2,v1,v2,w,y,com\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
        os << detail::fmt9(tr.t[i]) << ',' << detail::fmt9(tr.x1[i]) << ','
           << detail::fmt9(tr.x2[i]) << ',' << detail::fmt9(tr.v1[i]) << ','
           << detail::fmt9(tr.v2[i]) << ',' << detail::fmt9(tr.w[i]) << ','
           << detail::fmt9(tr.y[i]) << ',' << detail::fmt9(tr.com[i]) << '\n';
    }
}

}  // namespace mixfb
