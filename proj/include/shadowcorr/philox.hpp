#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace shadowcorr {

/// Philox4x32-10 counter-based generator. Output block i depends only on
/// (key, i), so any sample can be regenerated without replaying a stream.
class Philox4x32 {
  public:
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Block generate(Block counter, Key key);
};

/// Stream of standard normal pairs keyed by a 64-bit seed; the counter selects
/// the position in the stream.
class CounterRng {
  public:
    explicit CounterRng(std::uint64_t seed, std::uint64_t counter = 0) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          counter_(counter) {}

    void seek(std::uint64_t counter) noexcept { counter_ = counter; }
    std::uint64_t counter() const noexcept { return counter_; }

    /// Raw 128-bit block at the current counter; advances the counter.
    Philox4x32::Block next_block() noexcept;

    /// Two independent uniforms in the open interval (0, 1); advances the counter.
    std::pair<double, double> next_uniform_pair() noexcept;

    /// Two independent N(0, 1) draws by Box-Muller; advances the counter.
    std::pair<double, double> next_normal_pair() noexcept;

  private:
    Philox4x32::Key key_;
    std::uint64_t counter_;
};

}  // namespace shadowcorr
