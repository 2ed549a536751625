#pragma once

// Deterministic random stream shared by scenario generation and the genetic
// search. Every consumer draws through the bounded helpers below in a
// documented program order, so a (seed, input) pair fixes the whole run and
// tests can replay individual draws.

#include <cstdint>
#include <random>
#include <vector>

namespace peermarket {

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Raw 64-bit draw.
    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, n). n <= 1 returns 0 without consuming a draw.
    /// Rejection sampling keeps the result unbiased and independent of any
    /// library distribution implementation.
    std::size_t below(std::size_t n) {
        if (n <= 1)
            return 0;
        const std::uint64_t bound = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next();
        } while (x >= bound);
        return static_cast<std::size_t>(x % n);
    }

    /// Uniform integer in [lo, hi] inclusive.
    std::int64_t range(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::size_t>(hi - lo + 1)));
    }

    /// Uniform double in [0, 1) using the high 53 bits of one draw.
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Fisher-Yates, one below() per position from the back.
    template <class T> void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = below(i);
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices out of [0, n), in draw order. k <= n.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k);

  private:
    std::mt19937_64 engine_;
};

/// Stable sub-seed derivation so independent streams (relations vs orders vs
/// per-hour search) never interleave draws.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt);

} // namespace peermarket
