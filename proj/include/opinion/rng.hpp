#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace opinion {

// std::shuffle and std::uniform_int_distribution are allowed to differ between
// standard libraries. Runs must be reproducible from a seed alone, so the
// bounded draw and the shuffle are pinned here on top of mt19937_64, whose
// output sequence is fixed by the standard.

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Derives an independent stream seed from a user seed and a stream tag.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return splitmix64(seed ^ splitmix64(stream));
}

// Uniform integer in [0, n), rejection sampled. n must be positive.
inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= limit);
    return static_cast<std::size_t>(r % bound);
}

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::size_t j = uniform_index(rng, i);
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

} // namespace opinion
