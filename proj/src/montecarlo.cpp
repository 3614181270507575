#include "shadowcorr/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "shadowcorr/errors.hpp"

namespace shadowcorr {

namespace {

// Importance sums are accumulated over fixed-size chunks and reduced in
// chunk order, which keeps the floating-point result independent of both
// batch_count and the thread count.
constexpr std::uint64_t kChunk = 4096;

unsigned resolve_threads(unsigned requested, std::uint64_t units) {
    unsigned threads = requested != 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
    return static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(units, 1)));
}

// Runs body(i) for i in [0, units) on a pool of workers.
template <class F>
void parallel_for(std::uint64_t units, unsigned threads, const F& body) {
    threads = resolve_threads(threads, units);
    if (threads <= 1) {
        for (std::uint64_t i = 0; i < units; ++i) body(i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&] {
                try {
                    for (std::uint64_t i = next++; i < units; i = next++) body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
}

std::uint64_t batch_begin(std::uint64_t batch, const SimConfig& config) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(batch) * config.n_samples /
                                      config.batch_count);
}

IndicatorCounts count_range(double b1, double b2, ShadowingCorrelation rho_h, std::uint64_t seed,
                            std::uint64_t begin, std::uint64_t end) {
    IndicatorCounts counts;
    CounterRng rng(seed, begin);
    for (std::uint64_t i = begin; i < end; ++i) {
        const ShadowingSamplePair x = sample_pair(rho_h, rng);
        const bool f1 = x.x1 > b1;
        const bool f2 = x.x2 > b2;
        counts.n1 += f1;
        counts.n2 += f2;
        counts.n11 += f1 && f2;
    }
    counts.n = end - begin;
    return counts;
}

std::vector<IndicatorCounts> count_batches(double b1, double b2, ShadowingCorrelation rho_h,
                                           const SimConfig& config) {
    std::vector<IndicatorCounts> batches(config.batch_count);
    parallel_for(config.batch_count, config.threads, [&](std::uint64_t b) {
        batches[b] = count_range(b1, b2, rho_h, config.seed, batch_begin(b, config),
                                 batch_begin(b + 1, config));
    });
    return batches;
}

double indicator_correlation(const IndicatorCounts& c) {
    const double n = static_cast<double>(c.n);
    const double p1 = static_cast<double>(c.n1) / n;
    const double p2 = static_cast<double>(c.n2) / n;
    const double p11 = static_cast<double>(c.n11) / n;
    // Identical indicator sequences give var1 == var2 == cov bit for bit,
    // so perfectly correlated samples report exactly 1.
    const double var1 = p1 - p1 * p1;
    const double var2 = p2 - p2 * p2;
    const double cov = p11 - p1 * p2;
    return cov / std::sqrt(var1 * var2);
}

bool has_constant_indicator(const IndicatorCounts& c) {
    return c.n1 == 0 || c.n1 == c.n || c.n2 == 0 || c.n2 == c.n;
}

// Mean-shifted proposal N((b1, b2), Sigma). Near |rho| = 1 the law lives on a
// line and the tilt is applied to the single driving variable instead.
struct Tilt {
    double b1;
    double b2;
    double rho;
    double s;
    bool degenerate;
    double a1 = 0.0;
    double a2 = 0.0;
    double half_quad = 0.0;
    double shift = 0.0;

    Tilt(double b1_, double b2_, double rho_) : b1(b1_), b2(b2_), rho(rho_) {
        degenerate = std::abs(rho) > 1.0 - kDegenerateSnap;
        s = degenerate ? 0.0 : std::sqrt((1.0 - rho) * (1.0 + rho));
        if (degenerate) {
            shift = rho > 0.0 ? std::max(b1, b2) : b1;
            half_quad = 0.5 * shift * shift;
        } else {
            const double det = (1.0 - rho) * (1.0 + rho);
            a1 = (b1 - rho * b2) / det;
            a2 = (b2 - rho * b1) / det;
            half_quad = 0.5 * (a1 * b1 + a2 * b2);
        }
    }

    // Returns the weighted indicator for one proposal draw.
    double weighted_hit(double z1, double z2) const {
        if (degenerate) {
            const double x = shift + z1;
            const bool hit = rho > 0.0 ? (x > b1 && x > b2) : (x > b1 && -x > b2);
            return hit ? std::exp(half_quad - shift * x) : 0.0;
        }
        const double x1 = b1 + z1;
        const double x2 = b2 + rho * z1 + s * z2;
        if (!(x1 > b1 && x2 > b2)) return 0.0;
        return std::exp(half_quad - (a1 * x1 + a2 * x2));
    }
};

McEstimate importance_joint_failure(double b1, double b2, ShadowingCorrelation rho_h,
                                    const SimConfig& config) {
    const Tilt tilt(b1, b2, rho_h.value());
    const std::uint64_t chunks = (config.n_samples + kChunk - 1) / kChunk;
    struct Sums {
        double sum = 0.0;
        double sum_sq = 0.0;
    };
    std::vector<Sums> partial(chunks);
    parallel_for(chunks, config.threads, [&](std::uint64_t c) {
        const std::uint64_t begin = c * kChunk;
        const std::uint64_t end = std::min(config.n_samples, begin + kChunk);
        CounterRng rng(config.seed, begin);
        Sums sums;
        for (std::uint64_t i = begin; i < end; ++i) {
            const auto [z1, z2] = rng.next_normal_pair();
            const double y = tilt.weighted_hit(z1, z2);
            sums.sum += y;
            sums.sum_sq += y * y;
        }
        partial[c] = sums;
    });

    Sums total;
    for (const Sums& p : partial) {
        total.sum += p.sum;
        total.sum_sq += p.sum_sq;
    }
    const double n = static_cast<double>(config.n_samples);
    const double mean = total.sum / n;
    double variance = 0.0;
    if (config.n_samples > 1) {
        variance = std::max(0.0, (total.sum_sq - n * mean * mean) / (n - 1.0));
    }
    return {mean, std::sqrt(variance / n), config.n_samples, SimMethod::importance};
}

}  // namespace

std::string_view to_string(SimMethod method) {
    return method == SimMethod::plain ? "plain" : "importance";
}

SimMethod parse_sim_method(std::string_view text) {
    if (text == "plain") return SimMethod::plain;
    if (text == "importance") return SimMethod::importance;
    throw ConfigError("unknown simulation method '" + std::string(text) +
                      "' (expected plain or importance)");
}

void validate(const SimConfig& config) {
    if (config.n_samples == 0) throw ConfigError("n_samples must be at least 1");
    if (config.batch_count == 0 || config.batch_count > config.n_samples) {
        throw ConfigError("batch_count must lie in [1, n_samples]");
    }
}

IndicatorCounts& IndicatorCounts::operator+=(const IndicatorCounts& other) noexcept {
    n += other.n;
    n1 += other.n1;
    n2 += other.n2;
    n11 += other.n11;
    return *this;
}

ShadowingSamplePair sample_pair(ShadowingCorrelation rho_h, CounterRng& rng) {
    const auto [z1, z2] = rng.next_normal_pair();
    const double r = rho_h.value();
    if (r == 1.0) return {z1, z1};
    if (r == -1.0) return {z1, -z1};
    return {z1, r * z1 + std::sqrt((1.0 - r) * (1.0 + r)) * z2};
}

IndicatorCounts count_failures(double b1, double b2, ShadowingCorrelation rho_h,
                               const SimConfig& config) {
    validate(config);
    IndicatorCounts total;
    for (const IndicatorCounts& c : count_batches(b1, b2, rho_h, config)) total += c;
    return total;
}

McEstimate estimate_joint_failure(double b1, double b2, ShadowingCorrelation rho_h,
                                  const SimConfig& config) {
    validate(config);
    if (!std::isfinite(b1) || !std::isfinite(b2)) throw DomainError("thresholds must be finite");
    if (config.method == SimMethod::importance) {
        return importance_joint_failure(b1, b2, rho_h, config);
    }
    const IndicatorCounts counts = count_failures(b1, b2, rho_h, config);
    const double n = static_cast<double>(counts.n);
    const double p = static_cast<double>(counts.n11) / n;
    return {p, std::sqrt(p * (1.0 - p) / n), counts.n, SimMethod::plain};
}

McEstimate estimate_event_correlation(double b1, double b2, ShadowingCorrelation rho_h,
                                      const SimConfig& config) {
    validate(config);
    if (!std::isfinite(b1) || !std::isfinite(b2)) throw DomainError("thresholds must be finite");
    if (config.method != SimMethod::plain) {
        throw ConfigError("event correlation is only estimated with the plain method");
    }
    if (config.batch_count < 2) {
        throw ConfigError("event correlation needs batch_count >= 2 for its standard error");
    }

    const std::vector<IndicatorCounts> batches = count_batches(b1, b2, rho_h, config);
    IndicatorCounts total;
    for (const IndicatorCounts& c : batches) total += c;
    if (has_constant_indicator(total)) {
        throw InsufficientEventsError(total.n1, total.n2, total.n,
                                      "a link never failed or always failed");
    }
    for (const IndicatorCounts& c : batches) {
        if (has_constant_indicator(c)) {
            throw InsufficientEventsError(total.n1, total.n2, total.n,
                                          "some batch has a constant failure indicator");
        }
    }

    const double estimate = indicator_correlation(total);
    const double count = static_cast<double>(batches.size());
    double mean = 0.0;
    for (const IndicatorCounts& c : batches) mean += indicator_correlation(c);
    mean /= count;
    double ss = 0.0;
    for (const IndicatorCounts& c : batches) {
        const double d = indicator_correlation(c) - mean;
        ss += d * d;
    }
    const double std_error = std::sqrt(ss / (count - 1.0) / count);
    return {estimate, std_error, total.n, SimMethod::plain};
}

}  // namespace shadowcorr
