#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixfb/loop.hpp"

namespace mixfb {

struct Timeseries {
    std::vector<double> t;
    std::vector<double> y;
    std::vector<Vector> x;
    double dt = 0.0;
    std::string solver = "rk4";
    FeedbackConfig config;
};

inline double default_time_step(const FeedbackConfig& cfg) {
    double fastest = cfg.tau_p;
    for (const Complex& p : cfg.load.poles()) {
        double mag = std::abs(p);
        if (mag > 0.0) fastest = std::min(fastest, 1.0 / mag);
    }
    return fastest / 20.0;
}

/// Fixed-step RK4 integration of x' = A x + B (r - phi(k C x)).
/// Aborts with a diagnostic once |x|_inf exceeds 1e6; the sigmoid keeps a
/// well-posed loop bounded, so divergence signals a bad realization or
/// config.
inline Timeseries simulate(const FeedbackConfig& cfg, const Vector& x0, double T, double dt) {
    if (!(T > 0.0) || !(dt > 0.0)) {
        throw std::invalid_argument("simulate: T and dt must be positive");
    }
    ClosedLoop loop(cfg);
    if (x0.size() != loop.ss.order()) {
        throw std::invalid_argument("simulate: x0 dimension mismatch");
    }

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    Timeseries ts;
    ts.dt = dt;
    ts.config = cfg;
    ts.t.reserve(steps + 1);
    ts.y.reserve(steps + 1);
    ts.x.reserve(steps + 1);

    Vector x = x0;
    for (std::size_t i = 0; i <= steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (x.lpNorm<Eigen::Infinity>() > 1e6) {
            throw std::runtime_error("simulate: state diverged (|x| > 1e6 at t=" +
                                     std::to_string(t) + "); check realization/config");
        }
        ts.t.push_back(t);
        ts.y.push_back(loop.output(x));
        ts.x.push_back(x);
        if (i == steps) break;
        Vector k1 = loop.field(x);
        Vector k2 = loop.field(x + 0.5 * dt * k1);
        Vector k3 = loop.field(x + 0.5 * dt * k2);
        Vector k4 = loop.field(x + dt * k3);
        x += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return ts;
}

enum class WaveformClass { QuasiHarmonic, Relaxation };

struct OscillationEstimate {
    double omega = 0.0;
    double amplitude = 0.0;
    WaveformClass waveform = WaveformClass::QuasiHarmonic;
};

/// Frequency/amplitude estimate from the steady part of a sampled signal.
/// The first half is discarded as transient. Upward mean-crossings give the
/// period; fewer than 4 crossings or a crossing-spacing coefficient of
/// variation above 0.2 yields no estimate. A third-harmonic content of 15%
/// or more classifies the waveform as a relaxation oscillation.
inline std::optional<OscillationEstimate> estimate_oscillation(const std::vector<double>& t,
                                                               const std::vector<double>& y) {
    if (y.size() != t.size() || y.size() < 8) return std::nullopt;
    const std::size_t start = y.size() / 2;
    const std::size_t n = y.size() - start;

    double mean = 0.0;
    for (std::size_t i = start; i < y.size(); ++i) mean += y[i];
    mean /= static_cast<double>(n);

    std::vector<double> crossings;
    for (std::size_t i = start + 1; i < y.size(); ++i) {
        double a = y[i - 1] - mean;
        double b = y[i] - mean;
        if (a <= 0.0 && b > 0.0) {
            double frac = (b - a) != 0.0 ? -a / (b - a) : 0.0;
            crossings.push_back(t[i - 1] + frac * (t[i] - t[i - 1]));
        }
    }
    if (crossings.size() < 4) return std::nullopt;

    std::vector<double> spacing(crossings.size() - 1);
    double sp_mean = 0.0;
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
        spacing[i] = crossings[i + 1] - crossings[i];
        sp_mean += spacing[i];
    }
    sp_mean /= static_cast<double>(spacing.size());
    double sp_var = 0.0;
    for (double s : spacing) sp_var += (s - sp_mean) * (s - sp_mean);
    sp_var /= static_cast<double>(spacing.size());
    if (std::sqrt(sp_var) / sp_mean > 0.2) return std::nullopt;

    OscillationEstimate est;
    est.omega = 2.0 * std::numbers::pi / sp_mean;

    // per-cycle (max - min)/2 between consecutive upward crossings
    double amp = 0.0;
    std::size_t cycles = 0;
    std::size_t idx = start;
    for (std::size_t c = 0; c + 1 < crossings.size(); ++c) {
        double lo = std::numeric_limits<double>::max();
        double hi = std::numeric_limits<double>::lowest();
        bool any = false;
        while (idx < y.size() && t[idx] < crossings[c + 1]) {
            if (t[idx] >= crossings[c]) {
                lo = std::min(lo, y[idx]);
                hi = std::max(hi, y[idx]);
                any = true;
            }
            ++idx;
        }
        if (any) {
            amp += 0.5 * (hi - lo);
            ++cycles;
        }
    }
    if (cycles == 0) return std::nullopt;
    est.amplitude = amp / static_cast<double>(cycles);

    // third-harmonic ratio over an integer number of periods at the tail
    const double period = sp_mean;
    const double t_end = t.back();
    const auto whole = static_cast<std::size_t>((t_end - crossings.front()) / period);
    if (whole >= 1) {
        const double t0 = t_end - static_cast<double>(whole) * period;
        Complex c1{0.0, 0.0}, c3{0.0, 0.0};
        std::size_t count = 0;
        for (std::size_t i = start; i < y.size(); ++i) {
            if (t[i] < t0) continue;
            double ph = est.omega * (t[i] - t0);
            double v = y[i] - mean;
            c1 += v * Complex(std::cos(ph), -std::sin(ph));
            c3 += v * Complex(std::cos(3.0 * ph), -std::sin(3.0 * ph));
            ++count;
        }
        if (count > 0 && std::abs(c1) > 0.0) {
            est.waveform = (std::abs(c3) / std::abs(c1) >= 0.15) ? WaveformClass::Relaxation
                                                                 : WaveformClass::QuasiHarmonic;
        }
    }
    return est;
}

inline std::optional<OscillationEstimate> estimate_oscillation(const Timeseries& ts) {
    return estimate_oscillation(ts.t, ts.y);
}

}  // namespace mixfb
