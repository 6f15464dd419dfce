#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace mixfb {

enum class NonlinearityKind { Tanh, PiecewiseLinear };

/// Sigmoid feedback nonlinearity: odd, bounded by 1, slope in [0, 1].
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::Tanh;

    double value(double y) const {
        if (kind == NonlinearityKind::Tanh) return std::tanh(y);
        return y > 1.0 ? 1.0 : (y < -1.0 ? -1.0 : y);
    }

    double slope(double y) const {
        if (kind == NonlinearityKind::Tanh) {
            double t = std::tanh(y);
            return 1.0 - t * t;
        }
        return std::abs(y) < 1.0 ? 1.0 : 0.0;
    }

    std::string name() const {
        return kind == NonlinearityKind::Tanh ? "tanh" : "pl";
    }

    static Nonlinearity from_name(const std::string& name) {
        if (name == "tanh") return {NonlinearityKind::Tanh};
        if (name == "pl") return {NonlinearityKind::PiecewiseLinear};
        throw std::invalid_argument("unknown nonlinearity '" + name + "' (expected tanh|pl)");
    }
};

}  // namespace mixfb
