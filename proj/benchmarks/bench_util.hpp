#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "pors/random.hpp"
#include "pors/rules.hpp"

namespace pors::bench {

/// n mutually non-dominated points on a jittered concave arc, recall ascending.
inline std::vector<ObjectivePoint> arc_front(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<ObjectivePoint> out;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (static_cast<double>(i) + 0.5 + 0.4 * (rng.uniform() - 0.5)) / static_cast<double>(n);
        out.push_back(ObjectivePoint{1.0 - r * r, r, std::nullopt});
    }
    return out;
}

/// Random pool over n_rows rows; each rule covers a random band of rows.
inline PoolCoverage band_pool(std::size_t n_rows, std::size_t n_rules, std::uint64_t seed) {
    Rng rng(seed);
    PoolCoverage pool;
    pool.split = "train";
    pool.n_rows = n_rows;
    pool.positives = Bitset(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        if (rng.bernoulli(0.1)) pool.positives.set(i);
    }
    pool.n_positive = pool.positives.count();
    for (std::size_t r = 0; r < n_rules; ++r) {
        Bitset bits(n_rows);
        const std::size_t start = rng.below(n_rows);
        const std::size_t len = 1 + rng.below(n_rows / 20);
        for (std::size_t i = start; i < std::min(n_rows, start + len); ++i) {
            if (!pool.positives.test(i) || rng.bernoulli(0.6)) bits.set(i);
        }
        for (std::size_t i = 0; i < n_rows; ++i) {
            if (pool.positives.test(i) && rng.bernoulli(0.02)) bits.set(i);
        }
        pool.rules.push_back(Coverage(std::move(bits), pool.positives));
    }
    return pool;
}

}  // namespace pors::bench
