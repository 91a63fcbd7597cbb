#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "ordinal/construction.hpp"
#include "ordinal/rng.hpp"

namespace ordinal {

// One experimental unit's potential outcomes under treatment and control.
struct Unit {
    int y1 = 0;
    int y0 = 0;
};

// N units realizing a calibrated matrix: exactly n * p[k][l] units carry the
// outcome pair (k, l). Units are kept in canonical (y1, y0) order.
struct FinitePopulation {
    int categories = 0;
    std::vector<Unit> units;

    int size() const { return static_cast<int>(units.size()); }
};

FinitePopulation population_from_matrix(const CalibratedMatrix& cm);

// Complete randomization: exactly treated_count entries of `treated` are 1.
struct Assignment {
    std::vector<std::uint8_t> treated;
    int treated_count = 0;
};

// Uniformly random size-n1 treatment group among n units; deterministic
// given the seed. Throws InvalidDesign unless 0 < n1 < n.
Assignment draw_assignment(int n, int n1, std::uint64_t seed);

// Arm-by-category counts of observed outcomes after one assignment.
class ObservedTable {
public:
    ObservedTable(std::vector<long long> treated_counts,
                  std::vector<long long> control_counts);

    int categories() const { return static_cast<int>(treated_.size()); }
    const std::vector<long long>& treated_counts() const { return treated_; }
    const std::vector<long long>& control_counts() const { return control_; }
    long long treated_total() const;
    long long control_total() const;
    long long total() const { return treated_total() + control_total(); }
    std::vector<long long> pooled_counts() const;

    // "j,n1_0,..,n1_{J-1},n0_0,..,n0_{J-1}"
    std::string to_csv_row() const;
    static ObservedTable from_csv_row(const std::string& line);

    friend bool operator==(const ObservedTable& a, const ObservedTable& b) {
        return a.treated_ == b.treated_ && a.control_ == b.control_;
    }

private:
    std::vector<long long> treated_;
    std::vector<long long> control_;
};

ObservedTable observe(const FinitePopulation& pop, const Assignment& a);

// Squared Mann-Whitney-type statistic
//   U = sum_k sum_l n1[k] * n0[l] * (I(k>l) - I(k<l)),
// returned as the exact integer U^2.
std::int64_t u_squared(const ObservedTable& t);

enum class PValueMethod {
    monte_carlo,  // m multivariate-hypergeometric null draws, add-one p-value
    exact,        // full enumeration of the null distribution
    auto_select,  // exact when the split count is small, else monte_carlo
};

// Splits at or below this count qualify for exact enumeration in auto mode.
inline constexpr std::uint64_t kAutoExactSplitLimit = 1'000'000;

// Number of ways to split the pooled counts into a treated table with
// treated_total entries (the support size of the multivariate
// hypergeometric). Saturates at cap + 1.
std::uint64_t split_count(const std::vector<long long>& pooled, long long treated_total,
                          std::uint64_t cap = kAutoExactSplitLimit);

// Exact null distribution of U^2 given the pooled outcome counts: every
// split carries its multivariate hypergeometric weight, in exact integer
// arithmetic.
struct ExactNullDistribution {
    std::vector<std::int64_t> u2_values;  // ascending, unique
    std::vector<BigInt> tail_weight;      // weight of splits with U^2 >= u2_values[i]
    BigInt total_weight;

    // P(U^2_null >= u2_obs), exact.
    Rational tail_probability(std::int64_t u2_obs) const;
};

ExactNullDistribution build_exact_null(const std::vector<long long>& pooled,
                                       long long treated_total);

// Monte Carlo randomization p-value of the observed U^2 under the sharp
// null: m random splits of the pooled outcome counts into arms of the
// observed sizes, p = (1 + #{U^2_null >= U^2_obs}) / (m + 1). The null
// stream is seeded from (seed, pooled counts, n1), so tables with equal
// pooled counts share identical null draws.
double randomization_p_value(const ObservedTable& t, int n1, int m, std::uint64_t seed);

// Exact p-value P(U^2_null >= U^2_obs) by full enumeration of the splits.
double exact_p_value(const ObservedTable& t, int n1);
Rational exact_p_value_rational(const ObservedTable& t, int n1);

// Memoizes null distributions per (pooled counts, n1). Values depend only
// on the key (and the root seed for Monte Carlo), so concurrent lookups are
// scheduling-independent: any thread that rebuilds an entry produces the
// identical distribution.
class NullDistributionCache {
public:
    double p_value(const std::vector<long long>& pooled, long long n1,
                   std::int64_t u2_obs, PValueMethod method, int null_draws,
                   std::uint64_t root_seed);

private:
    struct McKey {
        std::uint64_t seed;
        int draws;
        long long n1;
        std::vector<long long> pooled;
        auto operator<=>(const McKey&) const = default;
    };
    struct ExactKey {
        long long n1;
        std::vector<long long> pooled;
        auto operator<=>(const ExactKey&) const = default;
    };

    std::shared_ptr<const std::vector<std::int64_t>> monte_carlo_null(
        const std::vector<long long>& pooled, long long n1, int draws,
        std::uint64_t root_seed);
    std::shared_ptr<const ExactNullDistribution> exact_null(
        const std::vector<long long>& pooled, long long n1);

    std::mutex mutex_;
    std::map<McKey, std::shared_ptr<const std::vector<std::int64_t>>> mc_;
    std::map<ExactKey, std::shared_ptr<const ExactNullDistribution>> exact_;
};

}  // namespace ordinal
