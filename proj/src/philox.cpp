#include "shadowcorr/philox.hpp"

#include <cmath>
#include <numbers>

namespace shadowcorr {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    lo = static_cast<std::uint32_t>(product);
    hi = static_cast<std::uint32_t>(product >> 32);
}

inline Philox4x32::Block round(const Philox4x32::Block& ctr, const Philox4x32::Key& key) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMul0, ctr[0], lo0, hi0);
    mulhilo(kMul1, ctr[2], lo1, hi1);
    return {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

// 53 random bits mapped to the midpoint of their cell, never 0 or 1.
inline double to_unit(std::uint32_t high, std::uint32_t low) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(high) << 32) | low) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

Philox4x32::Block Philox4x32::generate(Block counter, Key key) {
    for (int i = 0; i < 10; ++i) {
        if (i > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        counter = round(counter, key);
    }
    return counter;
}

Philox4x32::Block CounterRng::next_block() noexcept {
    const Philox4x32::Block ctr = {static_cast<std::uint32_t>(counter_),
                                   static_cast<std::uint32_t>(counter_ >> 32), 0, 0};
    ++counter_;
    return Philox4x32::generate(ctr, key_);
}

std::pair<double, double> CounterRng::next_uniform_pair() noexcept {
    const auto block = next_block();
    return {to_unit(block[0], block[1]), to_unit(block[2], block[3])};
}

std::pair<double, double> CounterRng::next_normal_pair() noexcept {
    const auto [u1, u2] = next_uniform_pair();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace shadowcorr
