#pragma once

// Seeded random generators for property-style tests.

#include <vector>

#include "ordinal/matrix_core.hpp"
#include "ordinal/rng.hpp"

namespace testgen {

inline std::vector<ordinal::Rational> random_distribution(ordinal::Rng& rng, int j,
                                                          int den) {
    std::vector<long long> counts(j, 0);
    for (int i = 0; i < den; ++i) {
        ++counts[rng.below(j)];
    }
    std::vector<ordinal::Rational> out;
    out.reserve(j);
    for (long long c : counts) {
        out.emplace_back(ordinal::BigInt(c), ordinal::BigInt(den));
    }
    return out;
}

inline ordinal::MarginalPair random_marginal_pair(ordinal::Rng& rng, int max_j = 4,
                                                  int max_den = 12) {
    const int j = 2 + static_cast<int>(rng.below(max_j - 1));
    const int den1 = 1 + static_cast<int>(rng.below(max_den));
    const int den0 = 1 + static_cast<int>(rng.below(max_den));
    return ordinal::MarginalPair::from_rationals(random_distribution(rng, j, den1),
                                                 random_distribution(rng, j, den0));
}

inline ordinal::MarginalPair random_dominant_pair(ordinal::Rng& rng, int max_j = 4,
                                                  int max_den = 12) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
        ordinal::MarginalPair mp = random_marginal_pair(rng, max_j, max_den);
        if (ordinal::check_stochastic_dominance(mp)) {
            return mp;
        }
    }
    const auto p = random_distribution(rng, 2 + static_cast<int>(rng.below(max_j - 1)), 6);
    return ordinal::MarginalPair::from_rationals(p, p);
}

inline ordinal::ProbMatrix random_prob_matrix(ordinal::Rng& rng, int max_j = 4,
                                              int max_den = 16) {
    const int j = 2 + static_cast<int>(rng.below(max_j - 1));
    const int den = 1 + static_cast<int>(rng.below(max_den));
    std::vector<std::vector<long long>> counts(j, std::vector<long long>(j, 0));
    for (int i = 0; i < den; ++i) {
        ++counts[rng.below(j)][rng.below(j)];
    }
    std::vector<std::vector<ordinal::Rational>> rows(j);
    for (int k = 0; k < j; ++k) {
        for (int l = 0; l < j; ++l) {
            rows[k].emplace_back(ordinal::BigInt(counts[k][l]), ordinal::BigInt(den));
        }
    }
    return ordinal::ProbMatrix::from_rows(std::move(rows));
}

}  // namespace testgen
