#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mixfb/dominance.hpp"
#include "mixfb/loop.hpp"

namespace mixfb {

/// Describing function of the unit-saturation nonlinearity:
/// N(E) = 1 for E <= 1, else (2/pi)[asin(1/E) + (1/E) sqrt(1 - 1/E^2)].
/// Continuous at E = 1 and strictly decreasing to 0 as E grows.
inline double describing_function(double amplitude) {
    if (!(amplitude > 0.0)) {
        throw std::invalid_argument("describing_function: amplitude must be positive");
    }
    if (amplitude <= 1.0) return 1.0;
    const double inv = 1.0 / amplitude;
    return (2.0 / std::numbers::pi) * (std::asin(inv) + inv * std::sqrt(1.0 - inv * inv));
}

struct BetaBar {
    double value = 0.5;
    bool boundary_warning = false;  // no interior solution, clamped to 0.5
};

/// Largest balance in [0, 0.5) keeping the controller zero magnitude at or
/// above the smallest pole magnitude of G (controller poles included).
/// Solved in closed form from |z_beta| = p_min; a bisection cross-check on
/// the same equation guards the algebra.
inline BetaBar beta_bar(const FeedbackConfig& cfg) {
    double p_min = std::numeric_limits<double>::max();
    for (const Complex& p : cfg.load.poles()) p_min = std::min(p_min, std::abs(p));
    p_min = std::min({p_min, 1.0 / cfg.tau_p, 1.0 / cfg.tau_n});

    const double t_sum = cfg.tau_p + cfg.tau_n;
    const double candidate = (1.0 + p_min * cfg.tau_p) / (2.0 + p_min * t_sum);
    auto mismatch = [&](double beta) {
        ControllerZero z = controller_zero(beta, cfg.tau_p, cfg.tau_n);
        if (!z.finite) return std::numeric_limits<double>::max();
        return std::abs(z.value) - p_min;
    };
    if (candidate > cfg.tau_p / t_sum && candidate < 0.5 &&
        std::abs(mismatch(candidate)) < 1e-6 * std::max(1.0, p_min)) {
        return {candidate, false};
    }
    // |z_beta| decreases from +inf to 0 on (tau_p/t_sum, 0.5)
    double a = cfg.tau_p / t_sum * (1.0 + 1e-12);
    double b = 0.5;
    if (mismatch(b - 1e-12) > 0.0) return {0.5, true};
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (mismatch(m) > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    return {0.5 * (a + b), false};
}

/// Gain cap keeping |k G| below 1 from the second harmonic up:
/// k_bar(beta) = 1 / |G(2 j w_r)|.
inline double k_bar(const FeedbackConfig& cfg, double beta, double omega_r) {
    if (!(omega_r > 0.0)) {
        throw std::invalid_argument("k_bar: omega_r must be positive");
    }
    const RationalTransferFunction g = loop_tf(cfg.with_beta(beta));
    const double mag = std::abs(g.evaluate(Complex(0.0, 2.0 * omega_r)));
    if (mag == 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / mag;
}

struct HBPrediction {
    double omega = 0.0;
    double amplitude = 0.0;
    int intersections = 0;   // total count across all phase crossings
    bool beta_accurate = false;  // beta < beta_bar
    bool k_accurate = false;     // k < 1/|G(2 j omega)|
};

namespace detail {

/// -180 deg crossings of G(jw): sign changes of Im G where Re G < 0,
/// bisected on Im G. Avoids principal-value wrap artifacts entirely.
inline std::vector<double> phase_crossings(const RationalTransferFunction& g) {
    double p_max = 1.0;
    for (const Complex& p : g.poles()) p_max = std::max(p_max, std::abs(p));
    const double w_lo = 1e-5 * p_max;
    const double w_hi = 1e3 * p_max;
    constexpr int kScan = 4000;
    const double ratio = std::pow(w_hi / w_lo, 1.0 / (kScan - 1));

    std::vector<double> out;
    double w_prev = w_lo;
    Complex v_prev = g.evaluate(Complex(0.0, w_prev));
    double w = w_lo * ratio;
    for (int i = 1; i < kScan; ++i, w *= ratio) {
        Complex v = g.evaluate(Complex(0.0, w));
        if (v_prev.imag() * v.imag() < 0.0 && (v_prev.real() < 0.0 || v.real() < 0.0)) {
            double a = w_prev, b = w;
            double fa = v_prev.imag();
            for (int it = 0; it < 200 && (b - a) > 1e-9 * b; ++it) {
                double m = std::sqrt(a * b);
                double fm = g.evaluate(Complex(0.0, m)).imag();
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            double wc = 0.5 * (a + b);
            if (g.evaluate(Complex(0.0, wc)).real() < 0.0) out.push_back(wc);
        }
        w_prev = w;
        v_prev = v;
    }
    return out;
}

}  // namespace detail

/// Describing-function oscillation prediction for the configured gain:
/// at every -180 deg crossing w with k |G(jw)| >= 1 the amplitude solves
/// N(E) = 1 / (k |G(jw)|) on [1, 1e3] by bisection (N is monotone there).
inline std::vector<HBPrediction> predict(const FeedbackConfig& cfg) {
    if (!(cfg.k > 0.0)) {
        throw std::invalid_argument("predict: gain k must be positive");
    }
    const RationalTransferFunction g = loop_tf(cfg);
    const BetaBar bb = beta_bar(cfg);

    std::vector<HBPrediction> out;
    for (double wc : detail::phase_crossings(g)) {
        const double mag = cfg.k * std::abs(g.evaluate(Complex(0.0, wc)));
        if (mag < 1.0) continue;
        const double target = 1.0 / mag;
        double a = 1.0, b = 1e3;
        if (describing_function(b) > target) continue;  // beyond the amplitude cap
        for (int i = 0; i < 200; ++i) {
            double m = 0.5 * (a + b);
            if (describing_function(m) > target) {
                a = m;
            } else {
                b = m;
            }
        }
        HBPrediction p;
        p.omega = wc;
        p.amplitude = 0.5 * (a + b);
        p.beta_accurate = cfg.beta < bb.value;
        p.k_accurate = cfg.k < k_bar(cfg, cfg.beta, wc);
        out.push_back(p);
    }
    for (auto& p : out) p.intersections = static_cast<int>(out.size());
    return out;
}

struct HBDesign {
    double beta = 0.0;
    double k_min = 0.0;   // oscillation onset gain at this beta
    double k_max = 0.0;   // harmonic-accuracy cap 1/|G(2 j w_r)|
    double k = 0.0;       // chosen gain (midpoint)
    double theta_n_deg = 0.0;
    std::string theta_n_bucket;
};

struct HBDesignResult {
    std::optional<HBDesign> design;
    std::optional<double> rejected_beta;  // phase solution that failed beta < beta_bar
    std::string reason;
};

namespace detail {

/// Continuous numerator phase theta_n(beta) at fixed w, strictly decreasing
/// in beta (the numerator point moves along a straight line whose cross
/// product with its velocity is w (tau_p - tau_n) < 0).
inline double theta_n_unwrapped(double beta, double tau_p, double tau_n, double omega) {
    const double re = 2.0 * beta - 1.0;
    const double im = omega * (beta * (tau_p + tau_n) - tau_p);
    double a = std::atan2(im, re);
    if (beta >= tau_p / (tau_p + tau_n)) a -= 2.0 * std::numbers::pi;
    return a;
}

}  // namespace detail

/// Phase-balance design: pick beta in [0, 1] with angle(G(j w_r)) = -180 deg
/// by bisection on the monotone unwrapped numerator phase, then bound the
/// gain by (critical_gain, k_bar). Designs with beta >= beta_bar are
/// rejected; those frequencies need the relaxation-mode design instead.
inline HBDesignResult design_hb(const FeedbackConfig& cfg, double omega_r) {
    if (!(omega_r > 0.0)) {
        throw std::invalid_argument("design_hb: omega_r must be positive");
    }
    HBDesignResult result;

    const Complex lv = cfg.load.evaluate(Complex(0.0, omega_r));
    // required theta_n (mod 2 pi): phase of -num at w equals
    // atan(tau_p w) + atan(tau_n w) - angle L(j w) for angle(G) = -180
    double target = std::atan(cfg.tau_p * omega_r) + std::atan(cfg.tau_n * omega_r) -
                    std::atan2(lv.imag(), lv.real());

    auto theta = [&](double b) {
        return detail::theta_n_unwrapped(b, cfg.tau_p, cfg.tau_n, omega_r);
    };
    const double hi = theta(0.0);
    const double lo = theta(1.0);
    while (target > hi) target -= 2.0 * std::numbers::pi;
    while (target < lo) target += 2.0 * std::numbers::pi;
    if (target > hi) {
        result.reason = "no balance places the phase crossing at omega_r";
        return result;
    }

    double a = 0.0, b = 1.0;
    for (int i = 0; i < 200; ++i) {
        double m = 0.5 * (a + b);
        if (theta(m) > target) {
            a = m;
        } else {
            b = m;
        }
    }
    const double beta_star = 0.5 * (a + b);

    const BetaBar bb = beta_bar(cfg);
    if (beta_star >= bb.value) {
        result.rejected_beta = beta_star;
        result.reason = "quasi-harmonic design rejected: beta >= beta_bar (relaxation regime)";
        return result;
    }

    const FeedbackConfig cb = cfg.with_beta(beta_star);
    const auto k_lo_opt = critical_gain(cb);
    if (!k_lo_opt) {
        result.rejected_beta = beta_star;
        result.reason = "no oscillation onset below the dominance bound at this beta";
        return result;
    }

    HBDesign design;
    design.beta = beta_star;
    design.k_min = *k_lo_opt;
    design.k_max = k_bar(cfg, beta_star, omega_r);
    design.k = 0.5 * (design.k_min + design.k_max);
    const double tn = std::atan2(omega_r * (beta_star * (cfg.tau_p + cfg.tau_n) - cfg.tau_p),
                                 2.0 * beta_star - 1.0);
    design.theta_n_deg = tn * 180.0 / std::numbers::pi;
    if (design.theta_n_deg < 0.0) design.theta_n_deg += 360.0;
    if (beta_star < cfg.tau_p / (cfg.tau_p + cfg.tau_n)) {
        design.theta_n_bucket = "[180,270]";
    } else if (beta_star < 0.5) {
        design.theta_n_bucket = "[90,180]";
    } else {
        design.theta_n_bucket = "[0,90]";
    }
    result.design = design;
    return result;
}

}  // namespace mixfb
