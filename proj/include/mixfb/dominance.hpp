#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mixfb/equilibria.hpp"
#include "mixfb/format.hpp"
#include "mixfb/loop.hpp"
#include "mixfb/simulate.hpp"

namespace mixfb {

/// Shifted-pole inventory for a candidate dominance rate lambda.
/// The rate is usable iff G(s - lambda) has exactly two unstable poles and
/// none sits on the shifted axis within 1e-9.
struct RateCandidate {
    double lambda = 0.0;
    bool valid = false;
    int unstable = 0;   // poles with Re > -lambda
    int stable = 0;     // poles with Re < -lambda
    int marginal = 0;   // |Re + lambda| < 1e-9
};

inline RateCandidate validate_rate(const RationalTransferFunction& g, double lambda) {
    RateCandidate rc;
    rc.lambda = lambda;
    const RationalTransferFunction gm = minimize(g).tf;
    for (const Complex& p : gm.poles()) {
        const double shifted = p.real() + lambda;
        if (std::abs(shifted) < 1e-9) {
            ++rc.marginal;
        } else if (shifted > 0.0) {
            ++rc.unstable;
        } else {
            ++rc.stable;
        }
    }
    rc.valid = (rc.unstable == 2 && rc.marginal == 0);
    return rc;
}

namespace detail {

inline double golden_min(const std::function<double(double)>& f, double a, double b, int iters = 120) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a);
    double d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < iters && (b - a) > 1e-15 * std::max(1.0, std::abs(b)); ++i) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::min(fc, fd);
}

}  // namespace detail

/// Gain bound of the frequency-domain 2-dominance test:
/// +inf when min_w Re(G(jw - lambda)) >= 0, else -1 / min. The minimum is
/// located on a 2000-point log grid spanning [1e-4 p_min, 1e4 p_max]
/// (plus w = 0) and every local dip is refined by golden section.
inline double k_bar_2(const RationalTransferFunction& g, double lambda) {
    const RateCandidate rc = validate_rate(g, lambda);
    if (!rc.valid) {
        throw std::invalid_argument("k_bar_2: lambda is not a valid 2-dominance rate");
    }
    const RationalTransferFunction gm = minimize(g).tf;

    double p_min = std::numeric_limits<double>::max();
    double p_max = 0.0;
    for (const Complex& p : gm.poles()) {
        const double mag = std::abs(p);
        p_min = std::min(p_min, mag);
        p_max = std::max(p_max, mag);
    }
    p_min = std::max(p_min, 1e-8);

    auto re_shifted = [&](double w) { return gm.evaluate(Complex(-lambda, w)).real(); };

    constexpr int kScan = 2000;
    const double w_lo = 1e-4 * p_min;
    const double w_hi = 1e4 * p_max;
    const double ratio = std::pow(w_hi / w_lo, 1.0 / (kScan - 1));

    std::vector<double> ws(kScan + 1);
    std::vector<double> vs(kScan + 1);
    ws[0] = 0.0;
    vs[0] = re_shifted(0.0);
    double w = w_lo;
    for (int i = 1; i <= kScan; ++i, w *= ratio) {
        ws[i] = w;
        vs[i] = re_shifted(w);
    }

    double best = vs[0];
    for (int i = 0; i <= kScan; ++i) {
        const bool left_ok = (i == 0) || vs[i] <= vs[i - 1];
        const bool right_ok = (i == kScan) || vs[i] <= vs[i + 1];
        best = std::min(best, vs[i]);
        if (left_ok && right_ok) {
            const double a = ws[std::max(i - 1, 0)];
            const double b = ws[std::min(i + 1, kScan)];
            if (b > a) best = std::min(best, detail::golden_min(re_shifted, a, b));
        }
    }

    if (best >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / best;
}

/// Log-spaced rate candidates strictly between the controller pole 1/tau_p
/// and the slowest load pole real part. Empty when the load is not faster
/// than the positive channel.
inline std::vector<double> lambda_grid(const FeedbackConfig& cfg, int count = 20,
                                       double margin = 1e-2) {
    double load_edge = std::numeric_limits<double>::max();
    for (const Complex& p : cfg.load.poles()) {
        load_edge = std::min(load_edge, std::abs(p.real()));
    }
    const double lo = (1.0 / cfg.tau_p) * (1.0 + margin);
    const double hi = load_edge * (1.0 - margin);
    if (!(hi > lo) || count < 1) return {};
    std::vector<double> out(static_cast<std::size_t>(count));
    if (count == 1) {
        out[0] = std::sqrt(lo * hi);
        return out;
    }
    const double ratio = std::pow(hi / lo, 1.0 / (count - 1));
    double lam = lo;
    for (int i = 0; i < count; ++i, lam *= ratio) {
        out[static_cast<std::size_t>(i)] = lam;
    }
    return out;
}

/// Largest certified gain over a rate grid (union of per-rate certificates).
inline double k_bar_2_max(const FeedbackConfig& cfg, const std::vector<double>& lambdas) {
    const RationalTransferFunction g = loop_tf(cfg);
    double best = 0.0;
    for (double lam : lambdas) {
        if (!validate_rate(g, lam).valid) continue;
        best = std::max(best, k_bar_2(g, lam));
        if (std::isinf(best)) break;
    }
    return best;
}

/// Smallest gain at which every closed-loop equilibrium is hyperbolically
/// unstable, found by a geometric sweep over [1e-3, k_hi) plus bisection.
/// Returns nullopt when no such gain exists below k_hi.
inline std::optional<double> critical_gain(const FeedbackConfig& cfg, double k_hi) {
    if (!(k_hi > 1e-3)) return std::nullopt;
    auto unstable_at = [&](double k) { return all_unstable(find_equilibria(cfg.with_gain(k))); };

    constexpr int kSweep = 240;
    const double lo = 1e-3;
    const double ratio = std::pow(k_hi / lo, 1.0 / (kSweep - 1));
    double prev = lo;
    bool prev_unstable = unstable_at(prev);
    if (prev_unstable) return prev;
    double k = lo * ratio;
    for (int i = 1; i < kSweep; ++i, k *= ratio) {
        if (unstable_at(k)) {
            double a = prev, b = k;
            for (int it = 0; it < 60 && (b - a) > 1e-7 * b; ++it) {
                double m = 0.5 * (a + b);
                if (unstable_at(m)) {
                    b = m;
                } else {
                    a = m;
                }
            }
            return 0.5 * (a + b);
        }
        prev = k;
    }
    return std::nullopt;
}

inline std::optional<double> critical_gain(const FeedbackConfig& cfg) {
    double hi = k_bar_2_max(cfg, lambda_grid(cfg));
    if (std::isinf(hi)) hi = 1e4;
    return critical_gain(cfg, std::min(hi, 1e4));
}

enum class CellLabel { Not2Dom, DomStable, Osc };

inline const char* to_string(CellLabel label) {
    switch (label) {
        case CellLabel::Not2Dom: return "NOT_2DOM";
        case CellLabel::DomStable: return "DOM_STABLE";
        case CellLabel::Osc: return "OSC";
    }
    return "?";
}

/// (k, beta) lattice classified into {NOT_2DOM, DOM_STABLE, OSC}; the
/// oscillation cells are 2-dominant with every equilibrium unstable, so
/// OSC is a subset of the certified region by construction.
struct RegionGrid {
    std::vector<double> k_values;
    std::vector<double> beta_values;
    std::vector<CellLabel> labels;       // beta-major: index = bi * k_count + ki
    std::vector<double> kbar2;           // per beta row (max over the rate grid)
    std::vector<double> critical_k;      // per beta row, NaN when none below kbar2

    CellLabel at(std::size_t ki, std::size_t bi) const {
        return labels[bi * k_values.size() + ki];
    }

    void write_csv(std::ostream& os) const;
};

inline RegionGrid region_scan(const FeedbackConfig& cfg, double k_lo, double k_hi,
                              std::size_t k_count, double beta_lo, double beta_hi,
                              std::size_t beta_count, int lambda_count = 20) {
    if (k_count < 1 || beta_count < 1) {
        throw std::invalid_argument("region_scan: grid dimensions must be >= 1");
    }
    RegionGrid grid;
    grid.k_values.resize(k_count);
    for (std::size_t i = 0; i < k_count; ++i) {
        grid.k_values[i] = k_count == 1
                               ? k_lo
                               : k_lo + (k_hi - k_lo) * static_cast<double>(i) /
                                     static_cast<double>(k_count - 1);
    }
    grid.beta_values.resize(beta_count);
    for (std::size_t i = 0; i < beta_count; ++i) {
        grid.beta_values[i] = beta_count == 1
                                  ? beta_lo
                                  : beta_lo + (beta_hi - beta_lo) * static_cast<double>(i) /
                                        static_cast<double>(beta_count - 1);
    }
    grid.labels.resize(k_count * beta_count, CellLabel::DomStable);
    grid.kbar2.resize(beta_count, 0.0);
    grid.critical_k.resize(beta_count, std::numeric_limits<double>::quiet_NaN());

    const std::vector<double> lambdas = lambda_grid(cfg, lambda_count);
    for (std::size_t bi = 0; bi < beta_count; ++bi) {
        const FeedbackConfig cb = cfg.with_beta(grid.beta_values[bi]);
        const double k2 = k_bar_2_max(cb, lambdas);
        grid.kbar2[bi] = k2;
        const double cap = std::isinf(k2) ? 1e4 : std::min(k2, 1e4);
        if (auto crit = critical_gain(cb, cap)) {
            grid.critical_k[bi] = *crit;
        }
        for (std::size_t ki = 0; ki < k_count; ++ki) {
            const double k = grid.k_values[ki];
            CellLabel label;
            if (k >= k2) {
                label = CellLabel::Not2Dom;
            } else if (k > 0.0 && all_unstable(find_equilibria(cb.with_gain(k)))) {
                label = CellLabel::Osc;
            } else {
                label = CellLabel::DomStable;
            }
            grid.labels[bi * k_count + ki] = label;
        }
    }

    // invariant: oscillation cells lie inside the certified region
    for (std::size_t bi = 0; bi < beta_count; ++bi) {
        for (std::size_t ki = 0; ki < k_count; ++ki) {
            if (grid.at(ki, bi) == CellLabel::Osc && grid.k_values[ki] >= grid.kbar2[bi]) {
                throw std::runtime_error("region_scan: OSC cell escaped the 2-dominant region");
            }
        }
    }
    return grid;
}

inline void RegionGrid::write_csv(std::ostream& os) const {
    os << "k,beta,label,kbar2,critical_k\n";
    for (std::size_t bi = 0; bi < beta_values.size(); ++bi) {
        for (std::size_t ki = 0; ki < k_values.size(); ++ki) {
            os << detail::fmt9(k_values[ki]) << ',' << detail::fmt9(beta_values[bi]) << ','
               << to_string(at(ki, bi)) << ',' << detail::fmt9(kbar2[bi]) << ','
               << detail::fmt9(critical_k[bi]) << '\n';
        }
    }
}

}  // namespace mixfb
