#include "shadowcorr/errors.hpp"

#include <sstream>

namespace shadowcorr {

namespace {

std::string describe_range(double target, double lo, double hi) {
    std::ostringstream os;
    os.precision(10);
    os << "event correlation " << target << " is not attainable; attainable range is [" << lo
       << ", " << hi << "]";
    return os.str();
}

std::string describe_counts(std::uint64_t f1, std::uint64_t f2, std::uint64_t n,
                            const std::string& detail) {
    std::ostringstream os;
    os << "insufficient failure events: observed " << f1 << " failures on link 1 and " << f2
       << " on link 2 in " << n << " samples";
    if (!detail.empty()) os << " (" << detail << ")";
    return os.str();
}

}  // namespace

UnattainableCorrelationError::UnattainableCorrelationError(double target, double rho_min,
                                                           double rho_max)
    : std::range_error(describe_range(target, rho_min, rho_max)),
      target_(target),
      rho_min_(rho_min),
      rho_max_(rho_max) {}

InsufficientEventsError::InsufficientEventsError(std::uint64_t failures1,
                                                 std::uint64_t failures2,
                                                 std::uint64_t samples,
                                                 const std::string& detail)
    : std::runtime_error(describe_counts(failures1, failures2, samples, detail)),
      failures1_(failures1),
      failures2_(failures2),
      samples_(samples) {}

}  // namespace shadowcorr
