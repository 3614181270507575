#pragma once

// Scalar standard-normal primitives: density, upper-tail probability Q(x) and
// its inverse. All functions reject non-finite input with DomainError.

namespace shadowcorr {

inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;

/// Standard normal density.
double normal_pdf(double x);

/// Q(x) = P(Z > x), Z ~ N(0, 1). Evaluated from the tail side so that the
/// result keeps full relative accuracy for large positive x.
double q_function(double x);

/// Returns x with Q(x) = p for p in (0, 1).
double q_inverse(double p);

}  // namespace shadowcorr
