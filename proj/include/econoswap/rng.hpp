#pragma once

#include <array>
#include <cstdint>

namespace econoswap {

/// One step of the splitmix64 sequence. Advances `state` and returns the
/// mixed output. Used for seed expansion and stream derivation only; the
/// simulation engine itself is xoshiro256**.
inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Derives an independent seed for one realization of an ensemble.
/// Realizations seeded this way may run in any order, or concurrently,
/// and produce identical streams.
inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t index) noexcept {
    std::uint64_t s = master_seed ^ (0x6a09e667f3bcc909ull * (index + 1));
    std::uint64_t a = splitmix64(s);
    std::uint64_t b = splitmix64(s);
    return a ^ (b >> 1);
}

/// xoshiro256** pseudo-random generator with helper draws used by the
/// simulation. All draw helpers are defined here, not delegated to
/// <random> distributions, so that streams are identical across standard
/// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) noexcept {
        // Seed expansion via splitmix64, as recommended by the xoshiro
        // authors; guarantees a nonzero state for any seed.
        for (auto& word : state_) word = splitmix64(seed);
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53-bit resolution. 1.0 is never
    /// returned, so stake fractions keep transfers at or below the
    /// loser's wealth.
    double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n). Unbiased (multiply-shift with
    /// rejection). n must be nonzero.
    std::uint64_t uniform_below(std::uint64_t n) noexcept {
        unsigned __int128 m =
            static_cast<unsigned __int128>(next()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<unsigned __int128>(next()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    /// Fair coin flip.
    bool coin() noexcept { return (next() >> 63) != 0; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_;
};

}  // namespace econoswap
