#pragma once

#include <string_view>

namespace shadowcorr {

/// Pearson correlation of the two standardized shadowing variables.
class ShadowingCorrelation {
  public:
    /// Throws DomainError unless value is finite and within [-1, 1].
    explicit ShadowingCorrelation(double value);

    double value() const noexcept { return value_; }

    friend bool operator==(ShadowingCorrelation, ShadowingCorrelation) = default;

  private:
    double value_;
};

enum class OrthantMethod { single_integral, second_method, closed_form_degenerate };

std::string_view to_string(OrthantMethod method);

/// P(X1 > b1, X2 > b2) for a standard bivariate normal pair.
struct OrthantProbability {
    double value = 0.0;
    OrthantMethod method = OrthantMethod::single_integral;
    double abs_error_bound = 0.0;
};

/// Correlations this close to +-1 are evaluated with the degenerate closed form.
inline constexpr double kDegenerateSnap = 1e-10;

/// Values below this are reported as exactly zero.
inline constexpr double kUnderflowFloor = 1e-300;

/// Integral over the second variable of Q((b1 - rho x) / sqrt(1 - rho^2)) phi(x),
/// by adaptive Gauss-Kronrod on x = b2 + t. Requires |rho| < 1.
OrthantProbability upper_tail_single_integral(double b1, double b2, ShadowingCorrelation rho_h);

/// Same quantity by Gauss-Legendre integration over the correlation parameter
/// (Drezner-Wesolowsky, in Genz's formulation). Requires |rho| < 1.
OrthantProbability upper_tail_second_method(double b1, double b2, ShadowingCorrelation rho_h);

/// Closed form at rho = +1 (comonotone) and rho = -1 (countermonotone).
OrthantProbability upper_tail_degenerate(double b1, double b2, ShadowingCorrelation rho_h);

/// Dispatches to the closed form when |rho| is within kDegenerateSnap of 1 and
/// to the single-integral evaluator otherwise.
OrthantProbability upper_tail(double b1, double b2, ShadowingCorrelation rho_h);

}  // namespace shadowcorr
