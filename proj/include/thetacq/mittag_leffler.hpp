#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace thetacq {

struct MLParams {
    double alpha = 0.5;
    double tol = 1e-15;  // absolute truncation tolerance
};

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(alpha k + 1),
/// evaluated by direct Taylor summation.
///
/// Valid for alpha in (0, 1] and |z| <= 2; this covers z = -t^alpha with
/// t in (0, 1], the range the solvers need. Summation stops once the term
/// magnitude has entered its decaying regime and dropped below tol; for
/// z in [-2, 0] the series alternates there, so the first omitted term bounds
/// the truncation error. Arguments where the partial sums grow large enough
/// to destroy double-precision accuracy (possible for small alpha with
/// 1 < |z| <= 2) are rejected instead of returning an inaccurate value.
inline double ml_eval(double alpha, double z, double tol = 1e-15) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("ml_eval: alpha must be in (0, 1]");
    if (!(std::abs(z) <= 2.0))
        throw std::domain_error("ml_eval: |z| > 2 is outside the validated series domain");
    if (z == 0.0) return 1.0;

    const double logabsz = std::log(std::abs(z));
    const bool negative = z < 0.0;
    double sum = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    double max_term = 0.0;
    for (long k = 0; k <= 400000; ++k) {
        double t = std::exp(static_cast<double>(k) * logabsz - std::lgamma(alpha * k + 1.0));
        const double mag = t;
        if (negative && (k & 1)) t = -t;
        sum += t;
        max_term = std::max(max_term, mag);
        if (mag < tol && mag <= prev && k >= 4) {
            if (max_term > 1e3)
                throw std::domain_error("ml_eval: series cancellation too severe for double precision");
            return sum;
        }
        prev = mag;
    }
    throw std::runtime_error("ml_eval: series did not converge");
}

inline double ml_eval(const MLParams& params, double z) {
    return ml_eval(params.alpha, z, params.tol);
}

}  // namespace thetacq
