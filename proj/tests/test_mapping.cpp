#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "shadowcorr/errors.hpp"
#include "shadowcorr/gaussian.hpp"
#include "shadowcorr/mapping.hpp"

using namespace shadowcorr;

namespace {

ShadowingCorrelation corr(double r) { return ShadowingCorrelation(r); }

CorrelationResult correlate(double eps1, double eps2, double r) {
    return event_correlation(DualLinkScenario::from_epsilons(eps1, eps2, corr(r)));
}

// Printed-table tolerance: half a unit in the last printed digit, or 10 %.
void check_table_value(double computed, double printed, double last_digit_unit) {
    CHECK(std::abs(computed - printed) <= std::max(0.5 * last_digit_unit, 0.10 * printed));
}

// dL/drho_h is the bivariate density at the thresholds.
double density(double x, double y, double r) {
    const double det = 1.0 - r * r;
    return std::exp(-(x * x + y * y - 2.0 * r * x * y) / (2.0 * det)) /
           (2.0 * std::numbers::pi * std::sqrt(det));
}

}  // namespace

TEST_CASE("normalized_margin") {
    CHECK(normalized_margin({23.0, 100.0, -100.0, 8.0}) == doctest::Approx(2.875).epsilon(1e-15));
    CHECK(normalized_margin({0.0, 0.0, 0.0, 1.0}) == 0.0);
    const double beta = normalized_margin({30.0, 120.0, -119.752, 8.0});
    CHECK(beta == doctest::Approx(3.719).epsilon(1e-12));
    CHECK(q_function(beta) == doctest::Approx(1e-4).epsilon(1e-3));
    CHECK_THROWS_AS(normalized_margin({0.0, 0.0, 0.0, 0.0}), DomainError);
    CHECK_THROWS_AS(normalized_margin({0.0, 0.0, 0.0, -2.0}), DomainError);
    CHECK_THROWS_AS(normalized_margin({std::numeric_limits<double>::infinity(), 0.0, 0.0, 1.0}),
                    DomainError);
}

TEST_CASE("link_reliability") {
    const LinkReliability median = link_reliability(0.0);
    CHECK(median.epsilon == 0.5);
    CHECK(median.reliability == 0.5);
    const LinkReliability good = link_reliability(3.719);
    CHECK(good.epsilon == doctest::Approx(1e-4).epsilon(1e-3));
    CHECK(std::abs(good.reliability + good.epsilon - 1.0) <= 1e-15);
    const LinkReliability bad = link_reliability(-3.719);
    CHECK(bad.reliability == doctest::Approx(1e-4).epsilon(1e-3));
    CHECK(std::abs(bad.reliability + bad.epsilon - 1.0) <= 1e-15);
    CHECK_THROWS_AS(link_reliability(std::numeric_limits<double>::quiet_NaN()), DomainError);

    const LinkReliability from_eps = link_from_epsilon(1e-4);
    CHECK(from_eps.beta == doctest::Approx(3.71902).epsilon(1e-5));
    CHECK(from_eps.epsilon == doctest::Approx(1e-4).epsilon(1e-10));
    CHECK_THROWS_AS(link_from_epsilon(0.0), DomainError);
}

TEST_CASE("indicator_sigma") {
    CHECK(indicator_sigma(0.5) == 0.5);
    CHECK(indicator_sigma(0.0) == 0.0);
    CHECK(indicator_sigma(1e-4) == doctest::Approx(0.009999499987499376).epsilon(1e-15));
    CHECK_THROWS_AS(indicator_sigma(1.5), DomainError);
}

TEST_CASE("event_correlation reproduces tabulated entries") {
    check_table_value(correlate(1e-4, 1e-4, 0.5).rho, 0.0232, 1e-4);
    check_table_value(correlate(1e-4, 1e-4, 0.3).rho, 0.004, 1e-3);
    CHECK(std::abs(correlate(1e-4, 1e-4, 0.0).rho) <= 1e-12);
    CHECK(correlate(1e-4, 1e-4, 1.0).rho == doctest::Approx(1.0).epsilon(1e-12));

    const CorrelationResult r = correlate(1e-4, 1e-4, 0.5);
    CHECK(r.sigma_ind1 == indicator_sigma(link_from_epsilon(1e-4).epsilon));
    CHECK(r.rho * r.sigma_ind1 * r.sigma_ind2 + 1e-8 ==
          doctest::Approx(r.joint_failure).epsilon(1e-9));
}

TEST_CASE("event_correlation rejects constant indicators") {
    const DualLinkScenario scenario{link_reliability(45.0), link_reliability(1.0), corr(0.5)};
    CHECK(scenario.link1.epsilon == 0.0);
    CHECK_THROWS_AS(event_correlation(scenario), DegenerateInputError);
    const DualLinkScenario sure_fail{link_reliability(1.0), link_reliability(-45.0), corr(0.5)};
    CHECK_THROWS_AS(event_correlation(sure_fail), DegenerateInputError);
}

TEST_CASE("invert_correlation") {
    CHECK(invert_correlation(0.0232, 1e-4, 1e-4).value() == doctest::Approx(0.5).epsilon(0.01));
    CHECK(invert_correlation(0.0, 1e-4, 1e-2).value() == 0.0);
    CHECK(invert_correlation(0.0, 0.3, 0.3).value() == 0.0);
    CHECK(invert_correlation(0.1, 1e-4, 1e-4).value() == doctest::Approx(0.7).epsilon(0.01));
    CHECK(invert_correlation(1.0, 1e-4, 1e-4).value() == 1.0);

    try {
        invert_correlation(0.99, 1e-4, 1e-2);
        FAIL("expected UnattainableCorrelationError");
    } catch (const UnattainableCorrelationError& e) {
        CHECK(e.rho_max() == doctest::Approx(0.0995).epsilon(1e-3));
        CHECK(e.rho_min() < 0.0);
        CHECK(std::string(e.what()).find("attainable range") != std::string::npos);
    }
    CHECK(invert_correlation(-1.0, 0.5, 0.5).value() == -1.0);
    CHECK_THROWS_AS(invert_correlation(-1.0, 0.5, 0.1), UnattainableCorrelationError);
    CHECK_THROWS_AS(invert_correlation(std::numeric_limits<double>::quiet_NaN(), 0.5, 0.5),
                    DomainError);
}

TEST_CASE("dual_failure_probability") {
    const auto dual = [](double r) {
        return dual_failure_probability(DualLinkScenario::from_epsilons(1e-4, 1e-4, corr(r)));
    };
    CHECK(dual(0.0) == doctest::Approx(1e-8).epsilon(1e-10));
    CHECK(dual(0.5) == doctest::Approx(0.0232 * 1e-4 * (1.0 - 1e-4) + 1e-8).epsilon(3e-3));
    CHECK(dual(1.0) == doctest::Approx(1e-4).epsilon(1e-10));
}

TEST_CASE("max_event_correlation") {
    CHECK(max_event_correlation(1e-4, 1e-4) == 1.0);
    CHECK(max_event_correlation(0.5, 0.5) == 1.0);
    CHECK(max_event_correlation(1e-4, 1e-2) == doctest::Approx(0.09950371902099892).epsilon(1e-14));
    CHECK(correlate(1e-4, 1e-2, 1.0).rho ==
          doctest::Approx(max_event_correlation(1e-4, 1e-2)).epsilon(1e-9));
    CHECK_THROWS_AS(max_event_correlation(0.0, 0.5), DomainError);
}

TEST_CASE("table_one") {
    const std::vector<TableRow> rows = table_one();
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].rho_h == 0.05);
    check_table_value(rows[1].rho, 0.0003, 1e-4);
    check_table_value(rows[4].rho, 0.0101, 1e-4);
    CHECK(std::abs(rows[7].rho - 1.0) <= 1e-12);
}

TEST_CASE("mapping invariants over the epsilon grid") {
    const std::vector<double> eps_grid = {1e-1, 1e-2, 1e-4};
    for (double e1 : eps_grid) {
        for (double e2 : eps_grid) {
            const LinkReliability l1 = link_from_epsilon(e1);
            const LinkReliability l2 = link_from_epsilon(e2);
            double previous = -2.0;
            for (double r = -0.95; r <= 0.95 + 1e-12; r += 0.05) {
                const CorrelationResult c = event_correlation({l1, l2, corr(r)});
                CAPTURE(e1);
                CAPTURE(e2);
                CAPTURE(r);

                // Consistency with the joint failure probability.
                const double dual = dual_failure_probability({l1, l2, corr(r)});
                CHECK(std::abs(dual - (l1.epsilon * l2.epsilon +
                                       c.rho * c.sigma_ind1 * c.sigma_ind2)) <=
                      1e-12 * std::max(dual, l1.epsilon * l2.epsilon));

                // Sign.
                if (r > 1e-12) CHECK(c.rho > 0.0);
                if (std::abs(r) <= 1e-12) CHECK(std::abs(c.rho) <= 1e-12);
                if (r < -1e-12) CHECK(c.rho < 0.0);

                // Strictly increasing wherever the step is representable.
                const double slope = density(l1.beta, l2.beta, r) / (c.sigma_ind1 * c.sigma_ind2);
                CHECK(c.rho >= previous);
                if (slope * 0.05 > 1e-13 * std::abs(c.rho)) CHECK(c.rho > previous);
                previous = c.rho;

                // Roundtrip. Where a 1e-7 move in rho_h changes rho by less than
                // double resolution, the recovered point must at least
                // reproduce the target exactly.
                const double back = invert_correlation(c.rho, l1, l2).value();
                if (std::abs(back - r) > 1e-7) {
                    CHECK(slope * 1e-7 < 1e-14 * std::abs(c.rho));
                    CHECK(event_correlation({l1, l2, corr(back)}).rho == c.rho);
                }
            }
            CHECK(event_correlation({l1, l2, corr(1.0)}).rho ==
                  doctest::Approx(max_event_correlation(l1.epsilon, l2.epsilon)).epsilon(1e-9));
        }
    }
}

TEST_CASE("beta and epsilon stay coherent for random budgets") {
    std::mt19937_64 gen(99);
    std::uniform_real_distribution<double> power(-20.0, 40.0);
    std::uniform_real_distribution<double> loss(60.0, 160.0);
    std::uniform_real_distribution<double> threshold(-130.0, -80.0);
    std::uniform_real_distribution<double> sigma(1.0, 12.0);
    for (int i = 0; i < 1000; ++i) {
        const LinkBudget b{power(gen), loss(gen), threshold(gen), sigma(gen)};
        const double beta = normalized_margin(b);
        CHECK(link_reliability(beta).epsilon == q_function(beta));
    }
}
