#include "shadowcorr/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "shadowcorr/errors.hpp"
#include "shadowcorr/gaussian.hpp"

namespace shadowcorr {

namespace {

void require_open_probability(double eps, const char* what) {
    if (!(eps > 0.0 && eps < 1.0)) {
        throw DomainError(std::string(what) + ": failure probability must lie in (0, 1)");
    }
}

void require_nondegenerate_link(const LinkReliability& link, int index) {
    if (!(link.epsilon > 0.0 && link.epsilon < 1.0)) {
        throw DegenerateInputError("link " + std::to_string(index) +
                                   " has a constant failure indicator (epsilon = " +
                                   std::to_string(link.epsilon) +
                                   "); event correlation is undefined");
    }
}

double correlation_at(double r, const LinkReliability& link1, const LinkReliability& link2) {
    DualLinkScenario scenario{link1, link2, ShadowingCorrelation(r)};
    return event_correlation(scenario).rho;
}

}  // namespace

DualLinkScenario DualLinkScenario::from_betas(double beta1, double beta2,
                                              ShadowingCorrelation rho_h) {
    return {link_reliability(beta1), link_reliability(beta2), rho_h};
}

DualLinkScenario DualLinkScenario::from_epsilons(double eps1, double eps2,
                                                 ShadowingCorrelation rho_h) {
    return {link_from_epsilon(eps1), link_from_epsilon(eps2), rho_h};
}

double normalized_margin(const LinkBudget& budget) {
    if (!std::isfinite(budget.p_t_dbm) || !std::isfinite(budget.p_l_db) ||
        !std::isfinite(budget.p_th_dbm) || !std::isfinite(budget.sigma_db)) {
        throw DomainError("link budget fields must be finite");
    }
    if (budget.sigma_db <= 0.0) throw DomainError("link budget sigma_db must be positive");
    return (budget.p_t_dbm - budget.p_l_db - budget.p_th_dbm) / budget.sigma_db;
}

LinkReliability link_reliability(double beta) {
    const double eps = q_function(beta);
    // For beta < 0, 1 - eps loses digits; Q(-beta) is the same quantity from
    // the accurate side.
    const double reliability = beta < 0.0 ? q_function(-beta) : 1.0 - eps;
    return {beta, eps, reliability};
}

LinkReliability link_from_epsilon(double eps) {
    require_open_probability(eps, "link_from_epsilon");
    return link_reliability(q_inverse(eps));
}

double indicator_sigma(double epsilon) {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
        throw DomainError("indicator_sigma: probability must lie in [0, 1]");
    }
    return std::sqrt(epsilon * (1.0 - epsilon));
}

CorrelationResult event_correlation(const DualLinkScenario& scenario) {
    require_nondegenerate_link(scenario.link1, 1);
    require_nondegenerate_link(scenario.link2, 2);
    const double eps1 = scenario.link1.epsilon;
    const double eps2 = scenario.link2.epsilon;

    CorrelationResult out;
    out.joint_failure =
        upper_tail(scenario.link1.beta, scenario.link2.beta, scenario.rho_h).value;
    out.sigma_ind1 = indicator_sigma(eps1);
    out.sigma_ind2 = indicator_sigma(eps2);
    const double rho = (out.joint_failure - eps1 * eps2) / (out.sigma_ind1 * out.sigma_ind2);
    if (!(std::abs(rho) <= 1.0 + 1e-9)) {
        throw std::runtime_error("event_correlation: |rho| exceeds 1 beyond rounding slack");
    }
    out.rho = std::clamp(rho, -1.0, 1.0);
    return out;
}

std::pair<double, double> attainable_correlation_range(const LinkReliability& link1,
                                                       const LinkReliability& link2) {
    return {correlation_at(-1.0, link1, link2), correlation_at(1.0, link1, link2)};
}

ShadowingCorrelation invert_correlation(double rho_target, const LinkReliability& link1,
                                        const LinkReliability& link2) {
    require_nondegenerate_link(link1, 1);
    require_nondegenerate_link(link2, 2);
    if (!std::isfinite(rho_target)) throw DomainError("invert_correlation: target must be finite");

    const auto [rho_min, rho_max] = attainable_correlation_range(link1, link2);
    const double tol = 1e-9 * std::max(std::abs(rho_target), 1e-12);
    if (rho_target < rho_min - tol || rho_target > rho_max + tol) {
        throw UnattainableCorrelationError(rho_target, rho_min, rho_max);
    }
    if (rho_target == 0.0) return ShadowingCorrelation(0.0);
    if (rho_target >= rho_max) return ShadowingCorrelation(1.0);
    if (rho_target <= rho_min) return ShadowingCorrelation(-1.0);

    // The forward map is non-decreasing in rho_h. Bisection runs to the
    // resolution of the bracket rather than stopping at the first point within
    // tolerance, so flat stretches of the map still land near the true root.
    double lo = -1.0;
    double hi = 1.0;
    while (true) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double rho = correlation_at(mid, link1, link2);
        if (rho == rho_target) return ShadowingCorrelation(mid);
        if (rho < rho_target) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double rho_lo = correlation_at(lo, link1, link2);
    const double rho_hi = correlation_at(hi, link1, link2);
    return ShadowingCorrelation(std::abs(rho_lo - rho_target) <= std::abs(rho_hi - rho_target)
                                    ? lo
                                    : hi);
}

ShadowingCorrelation invert_correlation(double rho_target, double eps1, double eps2) {
    require_open_probability(eps1, "invert_correlation");
    require_open_probability(eps2, "invert_correlation");
    return invert_correlation(rho_target, link_from_epsilon(eps1), link_from_epsilon(eps2));
}

double dual_failure_probability(const DualLinkScenario& scenario) {
    return upper_tail(scenario.link1.beta, scenario.link2.beta, scenario.rho_h).value;
}

double max_event_correlation(double eps1, double eps2) {
    require_open_probability(eps1, "max_event_correlation");
    require_open_probability(eps2, "max_event_correlation");
    if (eps1 == eps2) return 1.0;
    return (std::min(eps1, eps2) - eps1 * eps2) / (indicator_sigma(eps1) * indicator_sigma(eps2));
}

std::vector<TableRow> table_one() {
    const LinkReliability link = link_from_epsilon(kTableEpsilon);
    std::vector<TableRow> rows;
    rows.reserve(std::size(kTableRhoH));
    for (double rho_h : kTableRhoH) {
        rows.push_back({rho_h, correlation_at(rho_h, link, link)});
    }
    return rows;
}

}  // namespace shadowcorr
