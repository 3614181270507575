#include "shadowcorr/bivariate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "shadowcorr/errors.hpp"
#include "shadowcorr/gaussian.hpp"

namespace shadowcorr {

namespace {

void require_finite_thresholds(double b1, double b2, const char* what) {
    if (!std::isfinite(b1) || !std::isfinite(b2)) {
        throw DomainError(std::string(what) + ": thresholds must be finite");
    }
}

void require_nondegenerate(ShadowingCorrelation rho, const char* what) {
    if (std::abs(rho.value()) >= 1.0) {
        throw DegenerateInputError(std::string(what) +
                                   ": |rho_h| = 1 has no density; use upper_tail_degenerate");
    }
}

OrthantProbability finish(double value, double err, OrthantMethod method) {
    if (value < kUnderflowFloor) return {0.0, method, std::max(err, kUnderflowFloor)};
    return {value, method, err};
}

// ---------------------------------------------------------------------------
// Adaptive Gauss-Kronrod (7/15) used by the single-integral evaluator.

constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Estimate {
    double value;
    double error;
};

template <class F>
Estimate kronrod15(const F& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double fc = f(center);
    double kronrod = fc * kKronrodWeights[7];
    double gauss = fc * kGaussWeights[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kKronrodNodes[i];
        const double pair = f(center - dx) + f(center + dx);
        kronrod += kKronrodWeights[i] * pair;
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Globally adaptive: repeatedly bisects the segment with the largest error
// estimate until the summed estimate meets the tolerance or the segment
// budget is spent.
template <class F>
Estimate adaptive(const F& f, double a, double b, double abs_tol) {
    struct Segment {
        double a;
        double b;
        Estimate est;
    };
    constexpr std::size_t kMaxSegments = 200;
    std::vector<Segment> segments{{a, b, kronrod15(f, a, b)}};
    double value = segments.front().est.value;
    double error = segments.front().est.error;
    while (error > std::max(1e-13 * std::abs(value), abs_tol) && segments.size() < kMaxSegments) {
        const auto worst = std::max_element(
            segments.begin(), segments.end(),
            [](const Segment& x, const Segment& y) { return x.est.error < y.est.error; });
        const Segment seg = *worst;
        const double mid = 0.5 * (seg.a + seg.b);
        if (!(mid > seg.a && mid < seg.b)) break;
        const Estimate left = kronrod15(f, seg.a, mid);
        const Estimate right = kronrod15(f, mid, seg.b);
        *worst = {seg.a, mid, left};
        segments.push_back({mid, seg.b, right});
        value = 0.0;
        error = 0.0;
        for (const Segment& s : segments) {
            value += s.est.value;
            error += s.est.error;
        }
    }
    return {value, error};
}

// ---------------------------------------------------------------------------
// Gauss-Legendre abscissae/weights on [-1, 1] (positive half) for the
// correlation-integration method.

constexpr std::array<double, 3> kGl6Nodes = {0.9324695142031522, 0.6612093864662647,
                                             0.2386191860831970};
constexpr std::array<double, 3> kGl6Weights = {0.1713244923791705, 0.3607615730481384,
                                               0.4679139345726904};
constexpr std::array<double, 6> kGl12Nodes = {0.9815606342467191, 0.9041172563704750,
                                              0.7699026741943050, 0.5873179542866171,
                                              0.3678314989981802, 0.1252334085114692};
constexpr std::array<double, 6> kGl12Weights = {0.04717533638651177, 0.1069393259953183,
                                                0.1600783285433464,  0.2031674267230659,
                                                0.2334925365383547,  0.2491470458134029};
constexpr std::array<double, 10> kGl20Nodes = {
    0.9931285991850949, 0.9639719272779138, 0.9122344282513259, 0.8391169718222188,
    0.7463319064601508, 0.6360536807265150, 0.5108670019508271, 0.3737060887154196,
    0.2277858511416451, 0.07652652113349733};
constexpr std::array<double, 10> kGl20Weights = {
    0.01761400713915212, 0.04060142980038694, 0.06267204833410906, 0.08327674157670475,
    0.1019301198172404,  0.1181945319615184,  0.1316886384491766,  0.1420961093183821,
    0.1491729864726037,  0.1527533871307259};

struct LegendreRule {
    const double* nodes;
    const double* weights;
    int size;
};

LegendreRule legendre_rule(double abs_r) {
    if (abs_r < 0.3) return {kGl6Nodes.data(), kGl6Weights.data(), 3};
    if (abs_r < 0.75) return {kGl12Nodes.data(), kGl12Weights.data(), 6};
    return {kGl20Nodes.data(), kGl20Weights.data(), 10};
}

double cdf(double x) { return q_function(-x); }

// P(X > h, Y > k) with corr(X, Y) = r, |r| < 1.
double genz_upper(double h, double k, double r) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const LegendreRule rule = legendre_rule(std::abs(r));
    double hk = h * k;
    double bvn = 0.0;

    if (std::abs(r) < 0.925) {
        const double hs = 0.5 * (h * h + k * k);
        const double asr = std::asin(r);
        for (int i = 0; i < rule.size; ++i) {
            for (double sign : {-1.0, 1.0}) {
                const double sn = std::sin(0.5 * asr * (sign * rule.nodes[i] + 1.0));
                bvn += rule.weights[i] * std::exp((sn * hk - hs) / (1.0 - sn * sn));
            }
        }
        return bvn * asr / (2.0 * two_pi) + q_function(h) * q_function(k);
    }

    if (r < 0.0) {
        k = -k;
        hk = -hk;
    }
    const double as = (1.0 - r) * (1.0 + r);
    double a = std::sqrt(as);
    const double bs = (h - k) * (h - k);
    const double c = (4.0 - hk) / 8.0;
    const double d = (12.0 - hk) / 16.0;
    bvn = a * std::exp(-0.5 * (bs / as + hk)) *
          (1.0 - c * (bs - as) * (1.0 - d * bs / 5.0) / 3.0 + c * d * as * as / 5.0);
    if (hk > -160.0) {
        const double b = std::sqrt(bs);
        bvn -= std::exp(-0.5 * hk) * std::sqrt(two_pi) * q_function(b / a) * b *
               (1.0 - c * bs * (1.0 - d * bs / 5.0) / 3.0);
    }
    a *= 0.5;
    for (int i = 0; i < rule.size; ++i) {
        for (double sign : {-1.0, 1.0}) {
            const double xs = std::pow(a * (sign * rule.nodes[i] + 1.0), 2);
            const double rs = std::sqrt(1.0 - xs);
            bvn += a * rule.weights[i] *
                   (std::exp(-bs / (2.0 * xs) - hk / (1.0 + rs)) / rs -
                    std::exp(-0.5 * (bs / xs + hk)) * (1.0 + c * xs * (1.0 + d * xs)));
        }
    }
    bvn = -bvn / two_pi;

    if (r > 0.0) return bvn + q_function(std::max(h, k));
    bvn = -bvn;
    if (k > h) {
        bvn += h < 0.0 ? cdf(k) - cdf(h) : q_function(h) - q_function(k);
    }
    return bvn;
}

}  // namespace

ShadowingCorrelation::ShadowingCorrelation(double value) : value_(value) {
    if (!std::isfinite(value) || value < -1.0 || value > 1.0) {
        throw DomainError("shadowing correlation must be finite and within [-1, 1]");
    }
}

std::string_view to_string(OrthantMethod method) {
    switch (method) {
        case OrthantMethod::single_integral:
            return "single_integral";
        case OrthantMethod::second_method:
            return "second_method";
        case OrthantMethod::closed_form_degenerate:
            return "closed_form_degenerate";
    }
    return "unknown";
}

OrthantProbability upper_tail_single_integral(double b1, double b2, ShadowingCorrelation rho_h) {
    require_finite_thresholds(b1, b2, "upper_tail_single_integral");
    require_nondegenerate(rho_h, "upper_tail_single_integral");
    const double r = rho_h.value();
    const double s = std::sqrt((1.0 - r) * (1.0 + r));

    // Mass of the outer variable above 40 is below double range.
    constexpr double kUpper = 40.0;
    const double start = std::max(b2, -kUpper);
    if (start >= kUpper) return finish(0.0, kUnderflowFloor, OrthantMethod::single_integral);

    const auto integrand = [&](double t) {
        const double x = start + t;
        return q_function((b1 - r * x) / s) * normal_pdf(x);
    };

    // The inner Q factor switches from ~1 to ~0 around x = b1 / r with width
    // s / |r|; that point is a panel boundary when it falls inside the domain.
    double kink = -1.0;
    if (r != 0.0) kink = b1 / r - start;

    double total = 0.0;
    double error = 0.0;
    double t0 = 0.0;
    while (true) {
        double t1 = t0 + 1.0;
        if (kink > t0 && kink < t1) t1 = kink;
        const Estimate panel = adaptive(integrand, t0, t1, 1e-16 * total);
        total += panel.value;
        error += panel.error;
        t0 = t1;
        // Everything beyond t0 is bounded by the outer tail mass Q(start + t0).
        const double tail = start + t0 >= kUpper ? 0.0 : q_function(start + t0);
        if (tail <= 1e-20 * total || tail < 1e-320) {
            error += tail;
            break;
        }
    }
    return finish(total, error, OrthantMethod::single_integral);
}

OrthantProbability upper_tail_second_method(double b1, double b2, ShadowingCorrelation rho_h) {
    require_finite_thresholds(b1, b2, "upper_tail_second_method");
    require_nondegenerate(rho_h, "upper_tail_second_method");
    const double value = std::clamp(genz_upper(b1, b2, rho_h.value()), 0.0, 1.0);
    return finish(value, 1e-15, OrthantMethod::second_method);
}

OrthantProbability upper_tail_degenerate(double b1, double b2, ShadowingCorrelation rho_h) {
    require_finite_thresholds(b1, b2, "upper_tail_degenerate");
    const double r = rho_h.value();
    if (r == 1.0) {
        return finish(q_function(std::max(b1, b2)), 0.0, OrthantMethod::closed_form_degenerate);
    }
    if (r == -1.0) {
        // X2 = -X1, so the event is b1 < X1 < -b2.
        const double value = std::max(0.0, q_function(b1) - q_function(-b2));
        return finish(value, 1e-16, OrthantMethod::closed_form_degenerate);
    }
    throw DomainError("upper_tail_degenerate: requires rho_h = +1 or -1");
}

OrthantProbability upper_tail(double b1, double b2, ShadowingCorrelation rho_h) {
    require_finite_thresholds(b1, b2, "upper_tail");
    const double r = rho_h.value();
    if (std::abs(r) > 1.0 - kDegenerateSnap) {
        return upper_tail_degenerate(b1, b2, ShadowingCorrelation(r > 0.0 ? 1.0 : -1.0));
    }
    // The orthant is symmetric in its thresholds; integrate over the variable
    // with the larger one so that both orders give identical results.
    const double lo = std::min(b1, b2);
    const double hi = std::max(b1, b2);
    OrthantProbability result = upper_tail_single_integral(lo, hi, rho_h);

    const double eps_lo = q_function(lo);
    const double eps_hi = q_function(hi);
    const double floor = std::max(0.0, eps_lo + eps_hi - 1.0);
    const double slack = 1e-12 + 1e-9 * result.value;
    if (result.value < floor - slack || result.value > eps_hi + slack) {
        throw std::runtime_error("upper_tail: quadrature result violates the Frechet bounds");
    }
    return result;
}

}  // namespace shadowcorr
