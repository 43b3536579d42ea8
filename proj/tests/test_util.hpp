#pragma once

#include "banrep/core/types.hpp"

#include <random>

namespace banrep::testing {

inline Matrix random_matrix(std::uint64_t seed, Index rows, Index cols) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    Matrix m(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) m(i, j) = nd(rng);
    }
    return m;
}

inline Vector random_vector(std::uint64_t seed, Index n) { return random_matrix(seed, n, 1).col(0); }

/// Well-separated 1-D sites 0, 1.5, 3, ... with a seeded jitter in [0, 0.5).
inline Points spread_sites(std::uint64_t seed, Index n) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    Points p(n, 1);
    for (Index i = 0; i < n; ++i) p(i, 0) = 1.5 * static_cast<double>(i) + u(rng);
    return p;
}

}  // namespace banrep::testing
