#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mixfb/dominance.hpp"
#include "mixfb/harmonic_balance.hpp"
#include "mixfb/loop.hpp"

namespace mixfb {

namespace detail {

/// a(h) = (I + e^{Ah})^{-1} Gamma(h) with Gamma(h) = A^{-1}(e^{Ah} - I) B;
/// beta-independent core of the half-cycle map (beta enters through C only).
inline Vector half_cycle_state(const StateSpaceModel& ss, double h) {
    const Eigen::Index n = ss.order();
    const Matrix e = matrix_exponential(ss.A, h);
    const Vector gamma = ss.A.partialPivLu().solve((e - Matrix::Identity(n, n)) * ss.B);
    const Matrix m = Matrix::Identity(n, n) + e;
    Eigen::FullPivLU<Matrix> lu(m);
    if (!lu.isInvertible() || 1.0 / lu.rcond() > 1e12) {
        throw std::runtime_error("half_cycle_map: I + e^{Ah} is numerically singular");
    }
    return lu.solve(gamma);
}

}  // namespace detail

/// Relay half-cycle map k f(h) = k C (I + e^{Ah})^{-1} A^{-1}(e^{Ah} - I) B.
/// f(0) = 0 and f(h) -> G(0) = -(2 beta - 1) as h grows; a long-interval
/// root of k f(h) = -1 predicts a symmetric oscillation of half period h.
inline double half_cycle_map(const FeedbackConfig& cfg, double h) {
    if (h < 0.0) {
        throw std::invalid_argument("half_cycle_map: h must be >= 0");
    }
    const StateSpaceModel ss = realize_loop(cfg);
    if (h == 0.0) return 0.0;
    return cfg.k * (ss.C * detail::half_cycle_state(ss, h))(0);
}

enum class NoHalfPeriodReason { None, MinAboveMinus1, DcGainBelowMinus1, NoRootInHorizon };

inline const char* to_string(NoHalfPeriodReason r) {
    switch (r) {
        case NoHalfPeriodReason::None: return "NONE";
        case NoHalfPeriodReason::MinAboveMinus1: return "MIN_ABOVE_MINUS1";
        case NoHalfPeriodReason::DcGainBelowMinus1: return "DCGAIN_BELOW_MINUS1";
        case NoHalfPeriodReason::NoRootInHorizon: return "NO_ROOT_IN_HORIZON";
    }
    return "?";
}

struct HalfCycleResult {
    std::optional<double> h2;  // long root: predicted half period
    std::optional<double> h1;  // short transient root, informational
    NoHalfPeriodReason reason = NoHalfPeriodReason::None;
};

/// Scan k f(h) + 1 for sign changes over a log grid of half periods and
/// refine each by bisection. No oscillation is predicted when the curve
/// never reaches -1 (gain too small) or when the settled value k G(0)
/// itself lies below -1 (output latches past the switching plane, which
/// can happen only for beta > 1/2).
inline HalfCycleResult predict_half_period(const FeedbackConfig& cfg) {
    if (!(cfg.k > 0.0)) {
        throw std::invalid_argument("predict_half_period: gain k must be positive");
    }
    HalfCycleResult out;
    const double settled = -cfg.k * (2.0 * cfg.beta - 1.0);  // k G(0)
    if (settled < -1.0) {
        out.reason = NoHalfPeriodReason::DcGainBelowMinus1;
        return out;
    }

    const StateSpaceModel ss = realize_loop(cfg);
    auto kf = [&](double h) { return cfg.k * (ss.C * detail::half_cycle_state(ss, h))(0); };

    constexpr int kScan = 4000;
    const double h_lo = 1e-3 * cfg.tau_p;
    const double h_hi = 100.0 * cfg.tau_n;
    const double ratio = std::pow(h_hi / h_lo, 1.0 / (kScan - 1));

    std::vector<double> roots;
    double min_val = 0.0;  // kf(0) = 0
    double h_prev = 0.0;
    double v_prev = 0.0;
    double h = h_lo;
    for (int i = 0; i < kScan; ++i, h *= ratio) {
        const double v = kf(h);
        min_val = std::min(min_val, v);
        if ((v_prev + 1.0) * (v + 1.0) < 0.0) {
            double a = h_prev, b = h;
            double fa = v_prev + 1.0;
            for (int it = 0; it < 200 && (b - a) > 1e-10 * std::max(b, 1.0); ++it) {
                double m = 0.5 * (a + b);
                double fm = kf(m) + 1.0;
                if (fa * fm <= 0.0) {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        h_prev = h;
        v_prev = v;
    }

    if (roots.empty()) {
        out.reason = min_val > -1.0 ? NoHalfPeriodReason::MinAboveMinus1
                                    : NoHalfPeriodReason::NoRootInHorizon;
        return out;
    }
    if (roots.size() >= 2) {
        out.h1 = roots.front();
        // a long root indistinguishable from the transient root is rejected
        if ((roots.back() - roots.front()) / roots.back() < 0.01) {
            out.reason = NoHalfPeriodReason::NoRootInHorizon;
            return out;
        }
    }
    out.h2 = roots.back();
    return out;
}

/// Distance between the switching planes k C x = +-1.
inline double switching_distance(double k, double beta) {
    if (!(k > 0.0)) {
        throw std::invalid_argument("switching_distance: k must be positive");
    }
    return 2.0 / (k * std::sqrt(2.0 * beta * beta - 2.0 * beta + 1.0));
}

struct FSCandidate {
    double beta = 0.0;
    double k = 0.0;
    double d = 0.0;            // switching distance (ranking key, ascending)
    double h2 = 0.0;           // verified long root at (k, beta)
    bool beta_above_beta_bar = false;
    bool k_above_k_bar = false;
};

struct FSRejection {
    double beta = 0.0;
    double f_hr = 0.0;
    double k_candidate = 0.0;  // 0 when no positive-gain solution exists
    std::string reason;
};

struct FSDesign {
    double h_r = 0.0;
    std::vector<FSCandidate> candidates;  // ranked by switching distance
    std::vector<FSRejection> rejections;
};

/// Relaxation-frequency design: with h_r = pi / omega_r fixed, f(h_r) is
/// linear in the output row k C, so each balance on a grid over
/// (beta_bar, 1] yields the unique candidate gain k = -1 / f_beta(h_r).
/// Candidates must land inside the oscillation region (certified dominance
/// plus unstable equilibria) and reproduce h_r as their long root within 5%.
inline FSDesign design_fs(const FeedbackConfig& cfg, double omega_r, int beta_points = 200) {
    if (!(omega_r > 0.0)) {
        throw std::invalid_argument("design_fs: omega_r must be positive");
    }
    FSDesign out;
    out.h_r = std::numbers::pi / omega_r;

    const StateSpaceModel ss = realize_loop(cfg);  // A, B independent of beta
    const Vector a_core = detail::half_cycle_state(ss, out.h_r);
    const Eigen::Index m = ss.load_states;

    const double bb = beta_bar(cfg).value;
    const std::vector<double> lambdas = lambda_grid(cfg);

    for (int i = 1; i <= beta_points; ++i) {
        const double beta = bb + (1.0 - bb) * static_cast<double>(i) / beta_points;
        const double f_hr = beta * a_core(m) + (beta - 1.0) * a_core(m + 1);
        if (!(f_hr < 0.0)) {
            out.rejections.push_back({beta, f_hr, 0.0, "f(h_r) >= 0: no positive gain solves k f(h_r) = -1"});
            continue;
        }
        const double k = -1.0 / f_hr;
        const FeedbackConfig cand = cfg.with_beta(beta).with_gain(k);

        const double k2 = k_bar_2_max(cand, lambdas);
        if (!(k < k2)) {
            out.rejections.push_back({beta, f_hr, k, "gain not certified 2-dominant at any rate"});
            continue;
        }
        if (!all_unstable(find_equilibria(cand))) {
            out.rejections.push_back({beta, f_hr, k, "an equilibrium stays stable at the candidate gain"});
            continue;
        }
        const HalfCycleResult hp = predict_half_period(cand);
        if (!hp.h2 || std::abs(*hp.h2 - out.h_r) > 0.05 * out.h_r) {
            out.rejections.push_back({beta, f_hr, k, "long root of k f(h) = -1 is not h_r"});
            continue;
        }

        FSCandidate c;
        c.beta = beta;
        c.k = k;
        c.d = switching_distance(k, beta);
        c.h2 = *hp.h2;
        c.beta_above_beta_bar = beta > bb;
        c.k_above_k_bar = k > k_bar(cfg, beta, omega_r);
        out.candidates.push_back(c);
    }

    std::sort(out.candidates.begin(), out.candidates.end(),
              [](const FSCandidate& a, const FSCandidate& b) { return a.d < b.d; });
    return out;
}

inline void write_sweep_csv(const FSDesign& design, std::ostream& os) {
    os << "beta,f_hr,k_candidate,accepted,reason\n";
    struct Row {
        double beta;
        double f_hr;
        double k;
        bool accepted;
        std::string reason;
    };
    std::vector<Row> rows;
    for (const auto& c : design.candidates) {
        rows.push_back({c.beta, -1.0 / c.k, c.k, true, ""});
    }
    for (const auto& r : design.rejections) {
        rows.push_back({r.beta, r.f_hr, r.k_candidate, false, r.reason});
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.beta < b.beta; });
    for (const auto& r : rows) {
        os << detail::fmt9(r.beta) << ',' << detail::fmt9(r.f_hr) << ',' << detail::fmt9(r.k)
           << ',' << (r.accepted ? 1 : 0) << ',' << r.reason << '\n';
    }
}

}  // namespace mixfb
