#include "peermarket/rng.hpp"

namespace peermarket {

std::vector<std::size_t> Rng::sample_without_replacement(std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    for (std::size_t i = 0; i < n; ++i)
        pool[i] = i;
    std::vector<std::size_t> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k && !pool.empty(); ++i) {
        const std::size_t j = below(pool.size());
        out.push_back(pool[j]);
        pool[j] = pool.back();
        pool.pop_back();
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t salt) {
    // splitmix64 over base xor golden-ratio-spread salt
    std::uint64_t z = base ^ (salt * 0x9E3779B97F4A7C15ULL);
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

} // namespace peermarket
