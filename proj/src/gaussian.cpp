#include "shadowcorr/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "shadowcorr/errors.hpp"

namespace shadowcorr {

namespace {

constexpr double kBracket = 40.0;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite");
}

// Rational starting point for the upper quantile, p < 0.5 (Hastings).
double quantile_seed(double p) {
    const double t = std::sqrt(-2.0 * std::log(p));
    const double num = 2.515517 + t * (0.802853 + t * 0.010328);
    const double den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308));
    return t - num / den;
}

// Solves Q(x) = p for 0 < p < 0.5, so x > 0. Newton on log Q inside a
// shrinking bracket; falls back to bisection when a step leaves the bracket.
double upper_quantile(double p) {
    double lo = 0.0;
    double hi = kBracket;
    double x = std::clamp(quantile_seed(p), lo, hi);
    const double log_p = std::log(p);

    for (int iter = 0; iter < 200; ++iter) {
        const double q = q_function(x);
        if (q > p) {
            lo = x;
        } else {
            hi = x;
        }
        if (q == p) return x;

        double next;
        if (q > 0.0) {
            const double g = std::log(q) - log_p;
            const double slope = -normal_pdf(x) / q;
            next = x - g / slope;
        } else {
            next = 0.5 * (lo + hi);
        }
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);

        const double step = std::abs(next - x);
        x = next;
        if (step <= 1e-15 * std::max(1.0, std::abs(x)) || hi - lo <= 1e-15 * hi) break;
    }
    return x;
}

}  // namespace

double normal_pdf(double x) {
    require_finite(x, "normal_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double q_function(double x) {
    require_finite(x, "q_function");
    // erfc is evaluated directly on the tail argument; for x < 0 it returns
    // values near 2 with full absolute accuracy.
    return 0.5 * std::erfc(x * (1.0 / std::numbers::sqrt2));
}

double q_inverse(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("q_inverse: probability must lie in (0, 1)");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return upper_quantile(p);
    // 1 - p is exact for p in [0.5, 1).
    return -upper_quantile(1.0 - p);
}

}  // namespace shadowcorr
