#pragma once

#include <cstdint>

namespace sfj {

/// splitmix64 finalizer; used to derive independent streams and as a stateless mixer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// xorshift64* generator. Streams are keyed by (seed, stream id) so every worker
/// draws the same sequence in both engines.
class Rng {
public:
    constexpr Rng(std::uint64_t seed, std::uint64_t stream) noexcept
        : state_(mix64(mix64(seed) ^ mix64(stream + 0x5851f42d4c957f2dULL))) {
        if (state_ == 0) state_ = 0x2545f4914f6cdd1dULL;
    }

    constexpr std::uint64_t next() noexcept {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 0x2545f4914f6cdd1dULL;
    }

    /// Uniform in [0, bound); bound > 0.
    constexpr std::uint64_t below(std::uint64_t bound) noexcept {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    std::uint64_t state_;
};

}  // namespace sfj
