#pragma once

// Counter-based random streams. Path i of a run with seed s draws from
// Stream(s, i), so results do not depend on how paths are scheduled.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace ruin2d {

/// Philox4x32-10 block function (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter apply(Counter ctr, Key key) noexcept {
        for (int r = 0; r < 10; ++r) {
            if (r > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            ctr = round(ctr, key);
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;

    static constexpr Counter round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kM0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kM1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// A random stream identified by (seed, stream id). Satisfies UniformRandomBitGenerator.
class Stream {
public:
    using result_type = std::uint64_t;

    Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (used_ == 2) refill();
        return buffer_[used_++];
    }

    /// Uniform on the open interval (0,1); never returns 0 or 1.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 12) + 0.5) * 0x1.0p-52;
    }

    /// Standard normal via Box-Muller (one variate per pair of uniforms).
    double normal() noexcept {
        const double u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925 * u2);
    }

    std::uint64_t stream_id() const noexcept { return stream_id_; }

private:
    void refill() noexcept {
        const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_),
                                      static_cast<std::uint32_t>(block_ >> 32),
                                      static_cast<std::uint32_t>(stream_id_),
                                      static_cast<std::uint32_t>(stream_id_ >> 32)};
        const auto out = Philox4x32::apply(ctr, key_);
        buffer_[0] = (std::uint64_t{out[1]} << 32) | out[0];
        buffer_[1] = (std::uint64_t{out[3]} << 32) | out[2];
        ++block_;
        used_ = 0;
    }

    Philox4x32::Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> buffer_{};
    int used_ = 2;
};

}  // namespace ruin2d
