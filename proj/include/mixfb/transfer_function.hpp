#pragma once

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "mixfb/linalg.hpp"
#include "mixfb/polynomial.hpp"

namespace mixfb {

/// Rational transfer function num(s)/den(s) with real coefficients.
/// Common factors are never cancelled implicitly; use `minimize`.
class RationalTransferFunction {
public:
    RationalTransferFunction() : num_{0.0}, den_{1.0} {}

    RationalTransferFunction(Polynomial num, Polynomial den)
        : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) {
            throw std::invalid_argument("transfer function: denominator is identically zero");
        }
    }

    const Polynomial& num() const { return num_; }
    const Polynomial& den() const { return den_; }

    bool is_proper() const { return num_.degree() <= den_.degree(); }
    bool is_strictly_proper() const { return num_.is_zero() || num_.degree() < den_.degree(); }

    int relative_degree() const {
        return static_cast<int>(den_.degree()) - static_cast<int>(num_.degree());
    }

    Complex evaluate(const Complex& s) const {
        Complex d = den_.evaluate(s);
        // scale-aware pole guard: compare against the magnitude the
        // denominator terms would have without cancellation
        double scale = 0.0;
        double p = 1.0;
        for (double c : den_.coeffs()) {
            scale += std::abs(c) * p;
            p *= std::abs(s);
        }
        if (std::abs(d) <= 1e-12 * std::max(scale, 1e-300)) {
            throw std::domain_error("transfer function: evaluation at a pole");
        }
        return num_.evaluate(s) / d;
    }

    double dc_gain() const { return evaluate(Complex(0.0, 0.0)).real(); }

    std::vector<Complex> poles() const { return poly_roots(den_); }

    std::vector<Complex> zeros() const {
        if (num_.degree() < 1) return {};
        return poly_roots(num_);
    }

private:
    Polynomial num_;
    Polynomial den_;
};

inline RationalTransferFunction tf_multiply(const RationalTransferFunction& a,
                                            const RationalTransferFunction& b) {
    return {a.num() * b.num(), a.den() * b.den()};
}

inline RationalTransferFunction tf_add(const RationalTransferFunction& a,
                                       const RationalTransferFunction& b) {
    return {a.num() * b.den() + b.num() * a.den(), a.den() * b.den()};
}

inline RationalTransferFunction tf_scale(const RationalTransferFunction& a, double factor) {
    return {a.num().scaled(factor), a.den()};
}

inline RationalTransferFunction tf_negate(const RationalTransferFunction& a) {
    return {-a.num(), a.den()};
}

struct MinimizeResult {
    RationalTransferFunction tf;
    std::vector<Complex> cancelled;  // pole/zero pairs removed (pole value reported)
};

/// Cancel pole/zero pairs closer than `tol`, rebuilding both polynomials
/// from their remaining roots.
inline MinimizeResult minimize(const RationalTransferFunction& g, double tol = 1e-7) {
    MinimizeResult out{g, {}};
    if (g.num().degree() < 1 || g.num().is_zero()) return out;

    std::vector<Complex> zs = g.zeros();
    std::vector<Complex> ps = g.poles();
    std::vector<bool> z_used(zs.size(), false);
    std::vector<bool> p_used(ps.size(), false);

    for (std::size_t i = 0; i < zs.size(); ++i) {
        std::size_t best = ps.size();
        double best_d = tol;
        for (std::size_t j = 0; j < ps.size(); ++j) {
            if (p_used[j]) continue;
            double d = std::abs(zs[i] - ps[j]);
            if (d < best_d) {
                best_d = d;
                best = j;
            }
        }
        if (best < ps.size()) {
            z_used[i] = true;
            p_used[best] = true;
            out.cancelled.push_back(ps[best]);
        }
    }
    if (out.cancelled.empty()) return out;

    std::vector<Complex> zr, pr;
    for (std::size_t i = 0; i < zs.size(); ++i) {
        if (!z_used[i]) zr.push_back(zs[i]);
    }
    for (std::size_t j = 0; j < ps.size(); ++j) {
        if (!p_used[j]) pr.push_back(ps[j]);
    }
    Polynomial num = polynomial_from_roots(zr, g.num().leading());
    Polynomial den = polynomial_from_roots(pr, g.den().leading());
    out.tf = RationalTransferFunction(std::move(num), std::move(den));
    return out;
}

}  // namespace mixfb
