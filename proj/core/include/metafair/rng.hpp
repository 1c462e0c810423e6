#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace metafair::rng {

/// SplitMix64 (Steele, Lea & Flood). Chosen because every step is fixed-width
/// integer arithmetic, so sequences are identical on every platform and
/// toolchain. All seeded sampling in the project flows through this generator.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform draw in [0, bound) via rejection sampling (no modulo bias).
    std::uint64_t bounded(std::uint64_t bound);

private:
    std::uint64_t state_;
};

/// FNV-1a 64-bit, used to fan one run-level seed out into per-stage and
/// per-entry streams (seed ^ fnv1a(tag) fed through SplitMix64).
std::uint64_t fnv1a(std::string_view data);

std::uint64_t derive_seed(std::uint64_t base, std::string_view tag);

/// First n elements of a seeded Fisher–Yates shuffle: a without-replacement
/// sample preserving draw order.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t n,
                                        std::uint64_t seed);

}  // namespace metafair::rng
