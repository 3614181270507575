#pragma once

#include <utility>
#include <vector>

#include "shadowcorr/bivariate.hpp"

namespace shadowcorr {

/// Link budget of one radio path. Received power is
/// p_t - p_l - X with X ~ N(0, sigma_db^2) shadowing in dB.
struct LinkBudget {
    double p_t_dbm = 0.0;
    double p_l_db = 0.0;
    double p_th_dbm = 0.0;
    double sigma_db = 1.0;
};

/// Normalized margin and the resulting per-link failure/success probabilities.
struct LinkReliability {
    double beta = 0.0;
    double epsilon = 0.5;
    double reliability = 0.5;
};

struct DualLinkScenario {
    LinkReliability link1;
    LinkReliability link2;
    ShadowingCorrelation rho_h{0.0};

    static DualLinkScenario from_betas(double beta1, double beta2, ShadowingCorrelation rho_h);
    static DualLinkScenario from_epsilons(double eps1, double eps2, ShadowingCorrelation rho_h);
};

/// Failure-event correlation together with its ingredients.
struct CorrelationResult {
    double rho = 0.0;
    double joint_failure = 0.0;
    double sigma_ind1 = 0.0;
    double sigma_ind2 = 0.0;
};

struct TableRow {
    double rho_h;
    double rho;
};

/// (p_t - p_l - p_th) / sigma_db.
double normalized_margin(const LinkBudget& budget);

LinkReliability link_reliability(double beta);

/// Resolves a failure probability to a link via beta = q_inverse(eps).
/// The returned epsilon is recomputed from beta.
LinkReliability link_from_epsilon(double eps);

/// Standard deviation of a Bernoulli(eps) failure indicator.
double indicator_sigma(double epsilon);

/// Pearson correlation of the two links' failure indicators.
/// Throws DegenerateInputError when either epsilon is 0 or 1.
CorrelationResult event_correlation(const DualLinkScenario& scenario);

/// Event correlation reached at rho_h = -1 and rho_h = +1 for these links.
std::pair<double, double> attainable_correlation_range(const LinkReliability& link1,
                                                       const LinkReliability& link2);

/// Shadowing correlation producing the requested event correlation.
/// Throws UnattainableCorrelationError outside attainable_correlation_range.
ShadowingCorrelation invert_correlation(double rho_target, const LinkReliability& link1,
                                        const LinkReliability& link2);
ShadowingCorrelation invert_correlation(double rho_target, double eps1, double eps2);

/// Probability that both duplicated transmissions fail.
double dual_failure_probability(const DualLinkScenario& scenario);

/// Frechet upper bound on the event correlation for the given marginals.
double max_event_correlation(double eps1, double eps2);

/// Shadowing correlations tabulated for equal links with eps = 1e-4.
inline constexpr double kTableEpsilon = 1e-4;
inline constexpr double kTableRhoH[] = {0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.7, 1.0};

std::vector<TableRow> table_one();

}  // namespace shadowcorr
