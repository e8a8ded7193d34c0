#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

namespace relhyp {

// Draws are written with plain modular reduction so that sequences depend only
// on the mt19937_64 stream, which the standard pins down exactly.
inline std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) { return rng() % n; }

// k distinct indices from [0, n), returned ascending.
inline std::vector<std::uint32_t> sample_indices(std::uint64_t n, std::uint64_t k, std::mt19937_64& rng) {
    std::vector<std::uint32_t> all(n);
    for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
    if (k >= n) return all;
    for (std::uint64_t i = 0; i < k; ++i) std::swap(all[i], all[i + bounded(rng, n - i)]);
    all.resize(k);
    std::sort(all.begin(), all.end());
    return all;
}

inline std::uint64_t choose4(std::uint64_t n) { return n < 4 ? 0 : n * (n - 1) / 2 * (n - 2) / 3 * (n - 3) / 4; }

}  // namespace relhyp
