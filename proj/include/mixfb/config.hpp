#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixfb/nonlinearity.hpp"
#include "mixfb/transfer_function.hpp"

namespace mixfb {

/// One design session: normalized load plus mixed-feedback parameters.
/// Constraints: tau_n > tau_p > 0, load DC gain 1, load strictly proper
/// with poles/zeros left of -1/tau_n (the last one is only a warning).
struct FeedbackConfig {
    RationalTransferFunction load;
    double tau_p = 1.0;
    double tau_n = 10.0;
    double beta = 0.0;
    double k = 0.0;
    double r = 0.0;
    Nonlinearity phi;

    FeedbackConfig with_beta(double b) const {
        FeedbackConfig c = *this;
        c.beta = b;
        return c;
    }

    FeedbackConfig with_gain(double gain) const {
        FeedbackConfig c = *this;
        c.k = gain;
        return c;
    }
};

struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;

    bool ok() const { return errors.empty(); }
};

inline ValidationReport validate(const FeedbackConfig& cfg) {
    ValidationReport rep;
    if (!(cfg.tau_p > 0.0) || !(cfg.tau_n > cfg.tau_p)) {
        rep.errors.push_back("time constants must satisfy tau_n > tau_p > 0");
    }
    if (cfg.beta < 0.0 || cfg.beta > 1.0) {
        rep.errors.push_back("balance beta must lie in [0, 1]");
    }
    if (cfg.k < 0.0) {
        rep.errors.push_back("gain k must be >= 0");
    }
    if (!cfg.load.is_strictly_proper()) {
        rep.errors.push_back("load must have relative degree >= 1");
    }
    double dc = 0.0;
    bool dc_ok = true;
    try {
        dc = cfg.load.dc_gain();
    } catch (const std::domain_error&) {
        dc_ok = false;
    }
    if (!dc_ok || std::abs(dc - 1.0) > 1e-9) {
        rep.errors.push_back("load DC gain must equal 1 (normalized load)");
    }
    if (rep.errors.empty() && cfg.tau_n > 0.0) {
        const double edge = -1.0 / cfg.tau_n;
        for (const Complex& p : cfg.load.poles()) {
            if (p.real() >= edge) {
                rep.warnings.push_back("load pole right of -1/tau_n weakens the fast/slow pole split");
                break;
            }
        }
        for (const Complex& z : cfg.load.zeros()) {
            if (z.real() >= edge) {
                rep.warnings.push_back("load zero right of -1/tau_n weakens the fast/slow pole split");
                break;
            }
        }
    }
    return rep;
}

inline void to_json(nlohmann::json& j, const FeedbackConfig& cfg) {
    j = nlohmann::json{
        {"load", {{"num", cfg.load.num().coeffs()}, {"den", cfg.load.den().coeffs()}}},
        {"tau_p", cfg.tau_p},
        {"tau_n", cfg.tau_n},
        {"beta", cfg.beta},
        {"k", cfg.k},
        {"r", cfg.r},
        {"phi", cfg.phi.name()},
    };
}

inline void from_json(const nlohmann::json& j, FeedbackConfig& cfg) {
    auto num = j.at("load").at("num").get<std::vector<double>>();
    auto den = j.at("load").at("den").get<std::vector<double>>();
    cfg.load = RationalTransferFunction(Polynomial(std::move(num)), Polynomial(std::move(den)));
    cfg.tau_p = j.at("tau_p").get<double>();
    cfg.tau_n = j.at("tau_n").get<double>();
    cfg.beta = j.at("beta").get<double>();
    cfg.k = j.at("k").get<double>();
    cfg.r = j.value("r", 0.0);
    cfg.phi = Nonlinearity::from_name(j.value("phi", std::string("tanh")));
}

/// FNV-1a hash of the canonical JSON form, for provenance in outputs.
inline std::string config_hash(const FeedbackConfig& cfg) {
    nlohmann::json j = cfg;
    std::string s = j.dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return {buf};
}

}  // namespace mixfb
