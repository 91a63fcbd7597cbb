#include "ordinal/rng.hpp"

#include <cmath>

#include "ordinal/errors.hpp"

namespace ordinal {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

inline std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        word = splitmix64(s);
    }
}

std::uint64_t Rng::next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) {
        throw InvalidDesign("Rng::below requires a positive bound");
    }
    const std::uint64_t threshold = -bound % bound;
    for (;;) {
        const std::uint64_t r = next();
        if (r >= threshold) {
            return r % bound;
        }
    }
}

double Rng::unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

int hypergeometric_draw(Rng& rng, int population, int marked, int draws) {
    if (marked < 0 || draws < 0 || population < 0 || marked > population ||
        draws > population) {
        throw InvalidDesign("hypergeometric_draw: inconsistent parameters");
    }
    const int k_min = std::max(0, draws - (population - marked));
    const int k_max = std::min(marked, draws);
    if (k_min == k_max) {
        return k_min;
    }
    // pmf at k_min via log-gamma, then the multiplicative recurrence
    //   pmf(k+1)/pmf(k) = (marked-k)(draws-k) / ((k+1)(population-marked-draws+k+1))
    auto log_choose = [](int n, int k) {
        return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
    };
    double pmf = std::exp(log_choose(marked, k_min) +
                          log_choose(population - marked, draws - k_min) -
                          log_choose(population, draws));
    double u = rng.unit();
    int k = k_min;
    while (u >= pmf && k < k_max) {
        u -= pmf;
        pmf *= static_cast<double>(marked - k) * static_cast<double>(draws - k) /
               (static_cast<double>(k + 1) *
                static_cast<double>(population - marked - draws + k + 1));
        ++k;
    }
    return k;
}

}  // namespace ordinal
