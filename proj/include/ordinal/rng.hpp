#pragma once

#include <cstdint>
#include <initializer_list>

namespace ordinal {

// splitmix64 step; also used as the mixing function for seed derivation.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives child seeds from a root seed plus a sequence of salts. Absorbing
// the same values in the same order always yields the same seed, so
// scenario, replicate, and null-distribution streams can be reproduced
// independently of scheduling.
class SeedChain {
public:
    explicit SeedChain(std::uint64_t root) : state_(root) { advance(0x243f6a8885a308d3ull); }

    SeedChain& absorb(std::uint64_t value) {
        advance(value);
        return *this;
    }

    std::uint64_t seed() const { return state_; }

private:
    void advance(std::uint64_t value) {
        std::uint64_t s = state_ ^ (value + 0x9e3779b97f4a7c15ull);
        state_ = splitmix64(s);
    }

    std::uint64_t state_;
};

inline std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> salts) {
    SeedChain chain(root);
    for (std::uint64_t s : salts) {
        chain.absorb(s);
    }
    return chain.seed();
}

// xoshiro256** generator, seeded through splitmix64. Self-contained so that
// streams are identical across platforms and standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();

    // Uniform in [0, bound), unbiased (rejection sampling). bound >= 1.
    std::uint64_t below(std::uint64_t bound);

    // Uniform in [0, 1) with 53 random bits.
    double unit();

private:
    std::uint64_t state_[4];
};

// One multivariate-hypergeometric component: the number of marked items in
// a simple random sample of `draws` from a population of `population` items
// of which `marked` are marked. Inverse-transform over the support.
int hypergeometric_draw(Rng& rng, int population, int marked, int draws);

}  // namespace ordinal
