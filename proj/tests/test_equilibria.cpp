#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "helpers.hpp"

using namespace mixfb;
using Catch::Matchers::WithinAbs;

TEST_CASE("unique equilibrium at the origin for net-negative feedback") {
    auto eqs = find_equilibria(testutil::two_mass_config(0.3, 8.0));
    REQUIRE(eqs.size() == 1);
    REQUIRE_THAT(eqs[0].y_star, WithinAbs(0.0, 1e-10));
}

TEST_CASE("degenerate balance 0.5 solves the full state equation") {
    auto eqs = find_equilibria(testutil::two_mass_config(0.5, 24.0));
    REQUIRE(eqs.size() == 1);
    REQUIRE_THAT(eqs[0].y_star, WithinAbs(0.0, 1e-10));
    REQUIRE(eqs[0].x_star.lpNorm<Eigen::Infinity>() < 1e-10);
}

TEST_CASE("three equilibria under strong net-positive feedback") {
    FeedbackConfig cfg = testutil::two_mass_config(0.8, 10.0);
    auto eqs = find_equilibria(cfg);
    REQUIRE(eqs.size() == 3);

    auto oracle = testutil::scan_equilibria(cfg);
    REQUIRE(oracle.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE_THAT(eqs[i].y_star, WithinAbs(oracle[i], 1e-8));
    }
    REQUIRE(eqs[0].y_star < -1.0);
    REQUIRE_THAT(eqs[1].y_star, WithinAbs(0.0, 1e-10));
    REQUIRE(eqs[2].y_star > 1.0);

    // saturated outer latch states are stable, the middle one is not
    REQUIRE(eqs[0].classification == Stability::Stable);
    REQUIRE(eqs[1].classification == Stability::Unstable);
    REQUIRE(eqs[2].classification == Stability::Stable);
}

TEST_CASE("equilibria satisfy the fixed-point relation") {
    for (double beta : {0.2, 0.8}) {
        FeedbackConfig cfg = testutil::two_mass_config(beta, 12.0);
        for (const Equilibrium& eq : find_equilibria(cfg)) {
            const double c = cfg.k * (2.0 * cfg.beta - 1.0);
            REQUIRE_THAT(cfg.phi.value(eq.y_star) - cfg.r - eq.y_star / c, WithinAbs(0.0, 1e-10));
            // state consistency: y* = k C x*
            ClosedLoop loop(cfg);
            REQUIRE_THAT(loop.output(eq.x_star), WithinAbs(eq.y_star, 1e-9));
        }
    }
}

TEST_CASE("nonlinearity invariants on a dense grid") {
    for (auto kind : {NonlinearityKind::Tanh, NonlinearityKind::PiecewiseLinear}) {
        Nonlinearity phi{kind};
        for (int i = 0; i <= 10000; ++i) {
            const double y = -8.0 + 16.0 * i / 10000.0;
            const double s = phi.slope(y);
            REQUIRE(s >= 0.0);
            REQUIRE(s <= 1.0);
            REQUIRE(phi.value(y) * y >= 0.0);
            REQUIRE(std::abs(phi.value(y)) <= 1.0);
        }
        REQUIRE(phi.value(0.0) == 0.0);
    }
}

TEST_CASE("classification agrees with perturbation simulation on random configs") {
    std::mt19937 rng(47);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 20; ++trial) {
        const double tau_p = 0.05 + 0.45 * uni(rng);
        const double tau_n = tau_p * (3.0 + 7.0 * uni(rng));
        const double tau_l = tau_n / (5.0 + 20.0 * uni(rng));
        FeedbackConfig cfg;
        cfg.load = RationalTransferFunction(Polynomial{1.0}, Polynomial{1.0, tau_l});
        cfg.tau_p = tau_p;
        cfg.tau_n = tau_n;
        cfg.beta = uni(rng);
        cfg.k = std::pow(10.0, -1.0 + 2.5 * uni(rng));
        cfg.phi = {uni(rng) < 0.5 ? NonlinearityKind::Tanh : NonlinearityKind::PiecewiseLinear};

        const double margin = 0.1 / tau_n;  // skip near-marginal cases
        const double T = 20.0 * tau_n;
        const double dt = std::min(tau_p, tau_l) / 20.0;
        for (const Equilibrium& eq : find_equilibria(cfg)) {
            if (std::abs(eq.max_re_eig) < margin) continue;
            Vector x0 = eq.x_star;
            std::uniform_real_distribution<double> dir(-1.0, 1.0);
            Vector noise(x0.size());
            for (Eigen::Index i = 0; i < noise.size(); ++i) noise(i) = dir(rng);
            noise *= 1e-3 / noise.norm();
            Timeseries ts = simulate(cfg, x0 + noise, T, dt);
            double dev_end = 0.0;
            for (std::size_t i = ts.x.size() * 3 / 4; i < ts.x.size(); ++i) {
                dev_end = std::max(dev_end, (ts.x[i] - eq.x_star).norm());
            }
            if (eq.classification == Stability::Stable) {
                REQUIRE((ts.x.back() - eq.x_star).norm() < 0.5e-3);
            } else if (eq.classification == Stability::Unstable) {
                REQUIRE(dev_end > 2e-3);
            }
            ++checked;
        }
    }
    REQUIRE(checked >= 20);
}
