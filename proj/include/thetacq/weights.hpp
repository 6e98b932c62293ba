#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "thetacq/polynomial.hpp"

namespace thetacq {

enum class WeightKind { omega, theta_shift };

/// Convolution quadrature weights: Taylor coefficients at z=0 of a generating
/// function of the form [P(z)]^alpha e^{theta Q(z)}. kind distinguishes the
/// fractional-derivative weights (omega) from the pure shift weights
/// (theta_shift, the alpha=0 / P=1 specialization).
struct WeightSequence {
    std::vector<double> values;
    double alpha = 0.0;
    double theta = 0.0;
    WeightKind kind = WeightKind::omega;

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t j) const { return values[j]; }
};

/// Taylor coefficients w_0..w_count of [P(z)]^alpha e^{theta Q(z)}.
///
/// Uses the O(count) recurrence obtained from P(z) w'(z) = w(z) G(z) with
/// G = alpha P' + theta P Q':
///
///   w_0 = [P(0)]^alpha e^{theta Q(0)},
///   w_n = (1 / (n P_0)) [ w_0 G_{n-1}
///         + sum_{k=1}^{n-1} w_{n-k} (G_{k-1} - (n-k) P_k) ],
///
/// where the inner sum only runs over the finitely many k with G_{k-1} or
/// P_k nonzero, so the total cost is O(count * (deg P + deg Q)).
inline WeightSequence omega_weights(const Polynomial& P, const Polynomial& Q,
                                    double alpha, double theta, std::size_t count) {
    const double p0 = P.coeff(0);
    if (p0 == 0.0)
        throw std::domain_error("omega_weights: singular generating function (P(0) = 0)");

    const Polynomial G = g_polynomial(P, Q, alpha, theta);

    WeightSequence w;
    w.alpha = alpha;
    w.theta = theta;
    w.kind = WeightKind::omega;
    w.values.assign(count + 1, 0.0);
    w.values[0] = std::pow(p0, alpha) * std::exp(theta * Q.coeff(0));

    // k contributes only if G_{k-1} != 0 (k <= deg G + 1) or P_k != 0 (k <= deg P).
    const std::size_t reach = std::max(G.is_zero() ? std::size_t{0} : G.degree() + 1, P.degree());
    for (std::size_t n = 1; n <= count; ++n) {
        double s = w.values[0] * G.coeff(n - 1);
        const std::size_t kmax = std::min(n - 1, reach);
        for (std::size_t k = 1; k <= kmax; ++k)
            s += w.values[n - k] * (G.coeff(k - 1) - static_cast<double>(n - k) * P.coeff(k));
        w.values[n] = s / (static_cast<double>(n) * p0);
    }
    return w;
}

/// Shift weights: Taylor coefficients of e^{theta Q(z)}. Convolving a grid
/// sequence with them evaluates it at the theta-shifted time point to the
/// order of the underlying difference formula. For theta = 0 this is exactly
/// (1, 0, 0, ...).
inline WeightSequence shift_weights(const Polynomial& Q, double theta, std::size_t count) {
    WeightSequence w = omega_weights(Polynomial::constant(1.0), Q, 0.0, theta, count);
    w.kind = WeightKind::theta_shift;
    return w;
}

/// Weight count that makes the consistency-defect tail negligible for the
/// given step size: max(10/tau, 1e4).
inline std::size_t consistency_weight_count(double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("consistency_weight_count: tau must be positive");
    return static_cast<std::size_t>(std::max(10.0 / tau, 1.0e4));
}

/// Consistency defect of the weight symbol at z = e^{-tau}:
///
///   | tau^{-alpha} e^{-theta tau} sum_j w_j e^{-j tau}  -  1 |.
///
/// The e^{-theta tau} factor removes the theta-shift of the evaluation point,
/// so the defect measures the order of the formula against its own target;
/// for the BDF2-based weights it decays like O(tau^2).
///
/// Requires the sequence to be long enough that the geometric tail
/// |w_N| e^{-(N+1) tau} / (1 - e^{-tau}) is below 1e-14 (the weights decay
/// like n^{-alpha-1}, so the last stored weight bounds the tail).
inline double consistency_defect(const WeightSequence& w, double alpha, double theta, double tau) {
    if (!(tau > 0.0)) throw std::invalid_argument("consistency_defect: tau must be positive");
    if (w.values.empty()) throw std::invalid_argument("consistency_defect: empty weight sequence");

    const std::size_t N = w.values.size() - 1;
    const double damp = std::exp(-tau);
    const double tail =
        std::abs(w.values[N]) * std::pow(damp, static_cast<double>(N + 1)) / (1.0 - damp);
    if (!(tail < 1e-14))
        throw std::runtime_error("consistency_defect: weight sequence too short for this tau (tail not negligible)");

    double sum = 0.0;
    double factor = 1.0;
    for (std::size_t j = 0; j <= N; ++j) {
        sum += w.values[j] * factor;
        factor *= damp;
    }
    return std::abs(std::pow(tau, -alpha) * std::exp(-theta * tau) * sum - 1.0);
}

}  // namespace thetacq
