#include "metafair/rng.hpp"

#include <numeric>

namespace metafair::rng {

std::uint64_t SplitMix64::bounded(std::uint64_t bound) {
    if (bound == 0) return 0;
    // Reject draws from the tail that would bias the modulo.
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound + 1) % bound;
    std::uint64_t v = next();
    while (v > limit) v = next();
    return v % bound;
}

std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag) {
    SplitMix64 g(base ^ fnv1a(tag));
    return g.next();
}

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed) {
    std::vector<std::size_t> idx(population);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    SplitMix64 g(seed);
    for (std::size_t i = 0; i < n && i < population; ++i) {
        std::size_t j = i + static_cast<std::size_t>(g.bounded(population - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(n < population ? n : population);
    return idx;
}

}  // namespace metafair::rng
