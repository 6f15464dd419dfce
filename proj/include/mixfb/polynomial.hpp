#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

namespace mixfb {

using Complex = std::complex<double>;

/// Real polynomial stored as ascending powers of s. Trailing (high-order)
/// zero coefficients are trimmed on construction; the zero polynomial is
/// represented as {0} with degree 0.
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) {
            coeffs_.push_back(0.0);
        }
        trim();
    }

    Polynomial(std::initializer_list<double> coeffs) : Polynomial(std::vector<double>(coeffs)) {}

    const std::vector<double>& coeffs() const { return coeffs_; }

    std::size_t degree() const { return coeffs_.size() - 1; }

    double leading() const { return coeffs_.back(); }

    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double c : coeffs_) m = std::max(m, std::abs(c));
        return m;
    }

    template <typename Scalar>
    Scalar evaluate(const Scalar& s) const {
        Scalar acc{};
        for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
            acc = acc * s + Scalar(*it);
        }
        return acc;
    }

    Polynomial operator*(const Polynomial& rhs) const {
        if (is_zero() || rhs.is_zero()) return Polynomial();
        std::vector<double> out(coeffs_.size() + rhs.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            for (std::size_t j = 0; j < rhs.coeffs_.size(); ++j) {
                out[i + j] += coeffs_[i] * rhs.coeffs_[j];
            }
        }
        return Polynomial(std::move(out));
    }

    Polynomial operator+(const Polynomial& rhs) const {
        std::vector<double> out(std::max(coeffs_.size(), rhs.coeffs_.size()), 0.0);
        for (std::size_t i = 0; i < coeffs_.size(); ++i) out[i] += coeffs_[i];
        for (std::size_t i = 0; i < rhs.coeffs_.size(); ++i) out[i] += rhs.coeffs_[i];
        return Polynomial(std::move(out));
    }

    Polynomial operator-() const {
        std::vector<double> out = coeffs_;
        for (double& c : out) c = -c;
        return Polynomial(std::move(out));
    }

    Polynomial operator-(const Polynomial& rhs) const { return *this + (-rhs); }

    Polynomial scaled(double factor) const {
        std::vector<double> out = coeffs_;
        for (double& c : out) c *= factor;
        return Polynomial(std::move(out));
    }

    bool operator==(const Polynomial& rhs) const { return coeffs_ == rhs.coeffs_; }

private:
    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) {
            coeffs_.pop_back();
        }
    }

    std::vector<double> coeffs_;
};

/// Monic polynomial with the given complex roots; conjugate pairs are
/// combined so the result has real coefficients. Roots whose imaginary part
/// is below `imag_tol` (relative to magnitude) are treated as real.
inline Polynomial polynomial_from_roots(const std::vector<Complex>& roots,
                                        double leading = 1.0,
                                        double imag_tol = 1e-9) {
    std::vector<double> acc{leading};
    std::vector<Complex> pending(roots);
    while (!pending.empty()) {
        Complex r = pending.back();
        pending.pop_back();
        if (std::abs(r.imag()) <= imag_tol * std::max(1.0, std::abs(r))) {
            std::vector<double> next(acc.size() + 1, 0.0);
            for (std::size_t i = 0; i < acc.size(); ++i) {
                next[i + 1] += acc[i];
                next[i] += -r.real() * acc[i];
            }
            acc = std::move(next);
        } else {
            // pull the closest conjugate partner out of the pending set
            std::size_t best = pending.size();
            double best_d = std::numeric_limits<double>::max();
            for (std::size_t i = 0; i < pending.size(); ++i) {
                double d = std::abs(pending[i] - std::conj(r));
                if (d < best_d) {
                    best_d = d;
                    best = i;
                }
            }
            if (best == pending.size()) {
                throw std::invalid_argument("polynomial_from_roots: unpaired complex root");
            }
            Complex q = pending[best];
            pending.erase(pending.begin() + static_cast<std::ptrdiff_t>(best));
            // (s - r)(s - q) with q ~= conj(r): real quadratic s^2 - 2 Re(r) s + |r q|
            double b1 = -(r.real() + q.real());
            double b0 = (r * q).real();
            std::vector<double> next(acc.size() + 2, 0.0);
            for (std::size_t i = 0; i < acc.size(); ++i) {
                next[i + 2] += acc[i];
                next[i + 1] += b1 * acc[i];
                next[i] += b0 * acc[i];
            }
            acc = std::move(next);
        }
    }
    return Polynomial(std::move(acc));
}

}  // namespace mixfb
