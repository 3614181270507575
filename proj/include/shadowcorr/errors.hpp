#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace shadowcorr {

/// Non-finite or out-of-range argument to a numeric primitive.
class DomainError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

/// Input sits on a degenerate boundary that the called routine does not handle
/// (|rho_h| = 1 for quadrature, constant failure indicators for correlation).
class DegenerateInputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// Requested event correlation is outside what the marginals allow.
class UnattainableCorrelationError : public std::range_error {
  public:
    UnattainableCorrelationError(double target, double rho_min, double rho_max);

    double target() const noexcept { return target_; }
    double rho_min() const noexcept { return rho_min_; }
    double rho_max() const noexcept { return rho_max_; }

  private:
    double target_;
    double rho_min_;
    double rho_max_;
};

/// Simulation observed too few failures to form an indicator correlation.
class InsufficientEventsError : public std::runtime_error {
  public:
    InsufficientEventsError(std::uint64_t failures1, std::uint64_t failures2,
                            std::uint64_t samples, const std::string& detail);

    std::uint64_t failures1() const noexcept { return failures1_; }
    std::uint64_t failures2() const noexcept { return failures2_; }
    std::uint64_t samples() const noexcept { return samples_; }

  private:
    std::uint64_t failures1_;
    std::uint64_t failures2_;
    std::uint64_t samples_;
};

/// Invalid simulation configuration.
class ConfigError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace shadowcorr
