#pragma once

#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

namespace thetacq {

/// Dense univariate polynomial with real coefficients; coeffs()[j] is the
/// coefficient of z^j. The trailing coefficient is nonzero unless the
/// polynomial is identically zero (in which case it is stored as {0}).
class Polynomial {
public:
    Polynomial() : coeffs_{0.0} {}

    explicit Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
        if (coeffs_.empty()) coeffs_ = {0.0};
        trim();
    }

    static Polynomial constant(double c) { return Polynomial({c}); }

    /// Evaluation by Horner's rule.
    double operator()(double x) const {
        double r = 0.0;
        for (std::size_t j = coeffs_.size(); j-- > 0;) r = r * x + coeffs_[j];
        return r;
    }

    std::size_t degree() const { return coeffs_.size() - 1; }
    bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

    /// Coefficient of z^j; zero beyond the degree.
    double coeff(std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : 0.0; }
    const std::vector<double>& coeffs() const { return coeffs_; }

    Polynomial derivative() const {
        if (coeffs_.size() <= 1) return Polynomial();
        std::vector<double> d(coeffs_.size() - 1);
        for (std::size_t j = 1; j < coeffs_.size(); ++j) d[j - 1] = coeffs_[j] * static_cast<double>(j);
        return Polynomial(std::move(d));
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
        std::vector<double> s(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
        for (std::size_t j = 0; j < a.coeffs_.size(); ++j) s[j] += a.coeffs_[j];
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) s[j] += b.coeffs_[j];
        return Polynomial(std::move(s));
    }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return Polynomial();
        std::vector<double> p(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
        for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
            for (std::size_t j = 0; j < b.coeffs_.size(); ++j) p[i + j] += a.coeffs_[i] * b.coeffs_[j];
        return Polynomial(std::move(p));
    }

    friend Polynomial operator*(double c, const Polynomial& a) {
        std::vector<double> s(a.coeffs_);
        for (double& v : s) v *= c;
        return Polynomial(std::move(s));
    }

    bool operator==(const Polynomial& other) const { return coeffs_ == other.coeffs_; }

private:
    std::vector<double> coeffs_;

    void trim() {
        while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
    }
};

/// Generating polynomial of the backward difference formula of the given
/// order, expanded in powers of z: sum_{j=1}^{order} (1/j)(1-z)^j.
/// Orders 1 through 6 are supported (the classical zero-stable range).
inline Polynomial bdf_polynomial(int order) {
    if (order < 1 || order > 6)
        throw std::invalid_argument("bdf_polynomial: order must be in 1..6");
    std::vector<double> acc(static_cast<std::size_t>(order) + 1, 0.0);
    std::vector<double> pw{1.0};  // (1 - z)^j, expanded
    for (int j = 1; j <= order; ++j) {
        std::vector<double> next(pw.size() + 1, 0.0);
        for (std::size_t i = 0; i < pw.size(); ++i) {
            next[i] += pw[i];
            next[i + 1] -= pw[i];
        }
        pw = std::move(next);
        for (std::size_t i = 0; i < pw.size(); ++i) acc[i] += pw[i] / j;
    }
    return Polynomial(std::move(acc));
}

/// G(z) = alpha P'(z) + theta P(z) Q'(z), the driving polynomial of the
/// weight recurrence for the generating function [P(z)]^alpha e^{theta Q(z)}.
inline Polynomial g_polynomial(const Polynomial& P, const Polynomial& Q, double alpha, double theta) {
    return alpha * P.derivative() + theta * (P * Q.derivative());
}

}  // namespace thetacq
