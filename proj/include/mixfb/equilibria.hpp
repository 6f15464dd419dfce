#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "mixfb/loop.hpp"

namespace mixfb {

enum class Stability { Stable, Unstable, Marginal };

struct Equilibrium {
    double y_star = 0.0;
    Vector x_star;
    Stability classification = Stability::Stable;
    double max_re_eig = 0.0;
};

namespace detail {

inline Stability classify(double max_re, double tol = 1e-7) {
    if (max_re > tol) return Stability::Unstable;
    if (max_re < -tol) return Stability::Stable;
    return Stability::Marginal;
}

}  // namespace detail

/// All isolated equilibria of the closed loop. For k (2 beta - 1) != 0 these
/// are the solutions of phi(y) - r = y / (k (2 beta - 1)), located by a
/// bracket scan over |y| <= k|2 beta - 1| (1 + |r|) + 1 and refined by
/// bisection. The degenerate case k (2 beta - 1) ~ 0 falls back to a damped
/// Newton solve of the full state equation.
inline std::vector<Equilibrium> find_equilibria(const FeedbackConfig& cfg) {
    ClosedLoop loop(cfg);
    const double c = cfg.k * (2.0 * cfg.beta - 1.0);
    std::vector<Equilibrium> out;

    auto push = [&](double y, const Vector& x) {
        Equilibrium eq;
        eq.y_star = y;
        eq.x_star = x;
        eq.max_re_eig = max_real_eigenvalue(loop.jacobian(y));
        eq.classification = detail::classify(eq.max_re_eig);
        out.push_back(std::move(eq));
    };

    if (std::abs(c) < 1e-12) {
        // full-state solve A x + B (r - phi(kCx)) = 0 by damped Newton from 0
        Vector x = Vector::Zero(loop.ss.order());
        for (int it = 0; it < 100; ++it) {
            Vector f = loop.field(x);
            if (f.lpNorm<Eigen::Infinity>() < 1e-13) break;
            Matrix j = loop.jacobian(loop.output(x));
            Vector step = j.partialPivLu().solve(-f);
            double damp = 1.0;
            for (int half = 0; half < 30; ++half) {
                Vector trial = x + damp * step;
                if (loop.field(trial).lpNorm<Eigen::Infinity>() < f.lpNorm<Eigen::Infinity>()) {
                    x = trial;
                    break;
                }
                damp *= 0.5;
            }
        }
        push(loop.output(x), x);
        return out;
    }

    const double span = std::abs(c) * (1.0 + std::abs(cfg.r)) + 1.0;
    auto residual = [&](double y) { return cfg.phi.value(y) - cfg.r - y / c; };

    constexpr int kIntervals = 2000;
    double prev_y = -span;
    double prev_f = residual(prev_y);
    std::vector<double> ys;
    for (int i = 1; i <= kIntervals; ++i) {
        double y = -span + 2.0 * span * i / kIntervals;
        double f = residual(y);
        if (prev_f == 0.0) {
            ys.push_back(prev_y);
        } else if (prev_f * f < 0.0) {
            double a = prev_y, b = y;
            double fa = prev_f;
            while (b - a > 1e-12) {
                double m = 0.5 * (a + b);
                double fm = residual(m);
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            ys.push_back(0.5 * (a + b));
        }
        prev_y = y;
        prev_f = f;
    }
    if (std::abs(residual(span)) == 0.0) ys.push_back(span);

    std::sort(ys.begin(), ys.end());
    ys.erase(std::unique(ys.begin(), ys.end(),
                         [](double a, double b) { return std::abs(a - b) < 1e-9; }),
             ys.end());

    for (double y : ys) {
        const double u = cfg.r - cfg.phi.value(y);
        Vector x = loop.ss.A.partialPivLu().solve(-loop.ss.B * u);
        push(y, x);
    }
    return out;
}

inline bool all_unstable(const std::vector<Equilibrium>& eqs) {
    if (eqs.empty()) return false;
    return std::all_of(eqs.begin(), eqs.end(), [](const Equilibrium& e) {
        return e.classification == Stability::Unstable;
    });
}

}  // namespace mixfb
