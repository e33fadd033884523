#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace finsent {

// Deterministic uniform draws built directly on mt19937_64 output.
// std::uniform_real_distribution and std::shuffle are implementation-defined,
// so results would differ between standard libraries; these helpers keep
// seeded runs reproducible across toolchains.

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

// Unbiased integer in [0, n) by rejection sampling.
inline std::uint64_t uniform_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t draw = rng();
    while (draw >= limit) draw = rng();
    return draw % n;
}

// Fisher-Yates with the deterministic draws above.
template <class T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(uniform_index(rng, i));
        std::swap(items[i - 1], items[j]);
    }
}

}  // namespace finsent
