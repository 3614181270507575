#pragma once

#include <cstdint>
#include <string_view>

#include "shadowcorr/bivariate.hpp"
#include "shadowcorr/philox.hpp"

namespace shadowcorr {

enum class SimMethod { plain, importance };

std::string_view to_string(SimMethod method);
/// Parses "plain" or "importance"; throws ConfigError otherwise.
SimMethod parse_sim_method(std::string_view text);

struct SimConfig {
    std::uint64_t n_samples = 1'000'000;
    std::uint64_t seed = 1;
    SimMethod method = SimMethod::plain;
    std::uint64_t batch_count = 64;
    /// Worker threads; 0 selects the hardware concurrency. Results do not
    /// depend on this value.
    unsigned threads = 0;
};

/// Throws ConfigError if n_samples == 0 or batch_count is outside [1, n_samples].
void validate(const SimConfig& config);

struct McEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    SimMethod method = SimMethod::plain;
};

struct ShadowingSamplePair {
    double x1;
    double x2;
};

/// Failure counts from plain sampling: n1 and n2 count x_i > b_i, n11 both.
struct IndicatorCounts {
    std::uint64_t n = 0;
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    std::uint64_t n11 = 0;

    IndicatorCounts& operator+=(const IndicatorCounts& other) noexcept;
};

/// Draws one standardized shadowing pair with correlation rho_h.
ShadowingSamplePair sample_pair(ShadowingCorrelation rho_h, CounterRng& rng);

/// Plain-sampling failure counts; sample i always uses counter i of the seed.
IndicatorCounts count_failures(double b1, double b2, ShadowingCorrelation rho_h,
                               const SimConfig& config);

/// Estimate of P(X1 > b1, X2 > b2). The importance method samples from the
/// same law shifted to mean (b1, b2) and reweights by the density ratio.
McEstimate estimate_joint_failure(double b1, double b2, ShadowingCorrelation rho_h,
                                  const SimConfig& config);

/// Sample Pearson correlation of the two failure indicators, with a
/// batch-means standard error. Plain method only; needs batch_count >= 2.
/// Throws InsufficientEventsError when any batch sees a constant indicator.
McEstimate estimate_event_correlation(double b1, double b2, ShadowingCorrelation rho_h,
                                      const SimConfig& config);

}  // namespace shadowcorr
