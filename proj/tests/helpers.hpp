#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "mixfb/mixfb.hpp"

namespace testutil {

using mixfb::Complex;
using mixfb::FeedbackConfig;
using mixfb::Matrix;
using mixfb::Polynomial;
using mixfb::RationalTransferFunction;

inline FeedbackConfig two_mass_config(double beta = 0.1538, double k = 20.0) {
    FeedbackConfig cfg;
    cfg.load = RationalTransferFunction(Polynomial{200.0}, Polynomial{200.0, 20.0, 1.0});
    cfg.tau_p = 1.0;
    cfg.tau_n = 10.0;
    cfg.beta = beta;
    cfg.k = k;
    cfg.r = 0.0;
    cfg.phi = {mixfb::NonlinearityKind::Tanh};
    return cfg;
}

/// First-order load 1/(tau_l s + 1) with tau_l = 0.01, tau_p = 0.1, tau_n = 1.
inline FeedbackConfig first_order_config(double beta = 0.4, double k = 10.0,
                                         double tau_l = 0.01) {
    FeedbackConfig cfg;
    cfg.load = RationalTransferFunction(Polynomial{1.0}, Polynomial{1.0, tau_l});
    cfg.tau_p = 0.1;
    cfg.tau_n = 1.0;
    cfg.beta = beta;
    cfg.k = k;
    cfg.r = 0.0;
    cfg.phi = {mixfb::NonlinearityKind::Tanh};
    return cfg;
}

/// Greedy pairing distance between two complex multisets.
inline double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    for (const Complex& x : a) {
        std::size_t best = b.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < b.size(); ++j) {
            double d = std::abs(x - b[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        worst = std::max(worst, best_d);
        b.erase(b.begin() + static_cast<std::ptrdiff_t>(best));
    }
    return worst;
}

/// Oracle: truncated Taylor series for e^{Mt}.
inline Matrix taylor_expm(const Matrix& m, double t, int terms = 60) {
    Matrix x = m * t;
    Matrix acc = Matrix::Identity(m.rows(), m.cols());
    Matrix term = Matrix::Identity(m.rows(), m.cols());
    for (int k = 1; k <= terms; ++k) {
        term = term * x / static_cast<double>(k);
        acc += term;
    }
    return acc;
}

/// Oracle: eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
inline std::vector<double> jacobi_eigenvalues(Matrix a, int sweeps = 100) {
    const Eigen::Index n = a.rows();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        if (off < 1e-24) break;
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                if (std::abs(a(p, q)) < 1e-18) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
            }
        }
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(out.begin(), out.end());
    return out;
}

/// Oracle: first-harmonic Fourier coefficient of phi_pl(E sin) over E,
/// i.e. the describing function, by Simpson quadrature.
inline double fourier_describing_function(double E, int intervals = 20000) {
    auto phi_pl = [](double y) { return y > 1.0 ? 1.0 : (y < -1.0 ? -1.0 : y); };
    const double h = 2.0 * std::numbers::pi / intervals;
    double acc = 0.0;
    for (int i = 0; i <= intervals; ++i) {
        const double th = i * h;
        const double w = (i == 0 || i == intervals) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * phi_pl(E * std::sin(th)) * std::sin(th);
    }
    acc *= h / 3.0;
    return acc / (std::numbers::pi * E);
}

/// Oracle: dense uniform scan of Re G(jw - lambda) over [0, w_max].
inline double dense_min_re_shifted(const RationalTransferFunction& g, double lambda,
                                   double w_max, int points = 2000000) {
    double best = std::numeric_limits<double>::max();
    for (int i = 0; i < points; ++i) {
        const double w = w_max * static_cast<double>(i) / (points - 1);
        best = std::min(best, g.evaluate(Complex(-lambda, w)).real());
    }
    return best;
}

/// Oracle: sign-change bisection scan for the scalar equilibrium relation.
inline std::vector<double> scan_equilibria(const FeedbackConfig& cfg, int intervals = 4000) {
    const double c = cfg.k * (2.0 * cfg.beta - 1.0);
    const double span = cfg.k * std::abs(2.0 * cfg.beta - 1.0) + 1.0;
    auto f = [&](double y) { return cfg.phi.value(y) - cfg.r - y / c; };
    std::vector<double> out;
    double prev = -span;
    double fp = f(prev);
    for (int i = 1; i <= intervals; ++i) {
        const double y = -span + 2.0 * span * i / intervals;
        const double fy = f(y);
        if (fp * fy < 0.0 || fp == 0.0) {
            double a = prev, b = y, fa = fp;
            for (int it = 0; it < 200; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            out.push_back(0.5 * (a + b));
        }
        prev = y;
        fp = fy;
    }
    return out;
}

}  // namespace testutil
