#include "ordinal/randomization.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "ordinal/errors.hpp"

namespace ordinal {

namespace {

constexpr std::uint64_t kNullStreamTag = 0x6e756c6c64726177ull;  // "nulldraw"

std::int64_t u_squared_of_counts(const std::vector<long long>& treated,
                                 const std::vector<long long>& control) {
    const int j = static_cast<int>(treated.size());
    long long u = 0;
    for (int k = 0; k < j; ++k) {
        if (treated[k] == 0) continue;
        for (int l = 0; l < j; ++l) {
            if (k > l) {
                u += treated[k] * control[l];
            } else if (k < l) {
                u -= treated[k] * control[l];
            }
        }
    }
    return static_cast<std::int64_t>(u) * u;
}

std::uint64_t null_stream_seed(std::uint64_t root_seed,
                               const std::vector<long long>& pooled, long long n1) {
    SeedChain chain(root_seed);
    chain.absorb(kNullStreamTag);
    chain.absorb(static_cast<std::uint64_t>(n1));
    chain.absorb(pooled.size());
    for (long long c : pooled) {
        chain.absorb(static_cast<std::uint64_t>(c));
    }
    return chain.seed();
}

// m U^2 draws under the sharp null given the pooled counts, sorted ascending.
std::vector<std::int64_t> sample_null_u2(const std::vector<long long>& pooled,
                                         long long n1, int m, std::uint64_t seed) {
    const int j = static_cast<int>(pooled.size());
    const long long total = std::accumulate(pooled.begin(), pooled.end(), 0ll);
    Rng rng(seed);
    std::vector<long long> treated(j), control(j);
    std::vector<std::int64_t> draws;
    draws.reserve(m);
    for (int i = 0; i < m; ++i) {
        long long remaining = n1;
        long long rest = total;
        for (int cat = 0; cat < j; ++cat) {
            if (cat == j - 1) {
                treated[cat] = remaining;
            } else {
                treated[cat] = hypergeometric_draw(rng, static_cast<int>(rest),
                                                   static_cast<int>(pooled[cat]),
                                                   static_cast<int>(remaining));
            }
            control[cat] = pooled[cat] - treated[cat];
            remaining -= treated[cat];
            rest -= pooled[cat];
        }
        draws.push_back(u_squared_of_counts(treated, control));
    }
    std::sort(draws.begin(), draws.end());
    return draws;
}

double add_one_p_value(const std::vector<std::int64_t>& sorted_null,
                       std::int64_t u2_obs) {
    const auto it = std::lower_bound(sorted_null.begin(), sorted_null.end(), u2_obs);
    const auto count_ge = static_cast<long long>(sorted_null.end() - it);
    return static_cast<double>(1 + count_ge) /
           static_cast<double>(sorted_null.size() + 1);
}

void check_p_value_inputs(const ObservedTable& t, int n1) {
    if (t.treated_total() != n1) {
        throw InvalidDesign("observed treated total " + std::to_string(t.treated_total()) +
                            " does not match n1 = " + std::to_string(n1));
    }
    if (n1 <= 0 || t.control_total() <= 0) {
        throw InvalidDesign("both arms must be non-empty");
    }
}

}  // namespace

FinitePopulation population_from_matrix(const CalibratedMatrix& cm) {
    const int j = cm.matrix.categories();
    FinitePopulation pop;
    pop.categories = j;
    pop.units.reserve(cm.n);
    for (int k = 0; k < j; ++k) {
        for (int l = 0; l < j; ++l) {
            const Rational count = cm.matrix.at(k, l) * Rational(cm.n);
            if (!count.is_integer()) {
                throw ValidationError("matrix entry (" + std::to_string(k) + "," +
                                      std::to_string(l) + ") is not a multiple of 1/n");
            }
            const long long c = count.num().convert_to<long long>();
            for (long long i = 0; i < c; ++i) {
                pop.units.push_back(Unit{k, l});
            }
        }
    }
    return pop;
}

Assignment draw_assignment(int n, int n1, std::uint64_t seed) {
    if (n1 <= 0 || n1 >= n) {
        throw InvalidDesign("treated count must satisfy 0 < n1 < n");
    }
    Rng rng(seed);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < n1; ++i) {
        const int pick = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - i)));
        std::swap(order[i], order[pick]);
    }
    Assignment a;
    a.treated.assign(n, 0);
    a.treated_count = n1;
    for (int i = 0; i < n1; ++i) {
        a.treated[order[i]] = 1;
    }
    return a;
}

ObservedTable::ObservedTable(std::vector<long long> treated_counts,
                             std::vector<long long> control_counts)
    : treated_(std::move(treated_counts)), control_(std::move(control_counts)) {
    if (treated_.size() != control_.size()) {
        throw ValidationError("observed table arms must have equal length");
    }
    if (treated_.size() < 2) {
        throw ValidationError("observed table needs at least 2 categories");
    }
    for (size_t i = 0; i < treated_.size(); ++i) {
        if (treated_[i] < 0 || control_[i] < 0) {
            throw ValidationError("observed table counts must be nonnegative");
        }
    }
}

long long ObservedTable::treated_total() const {
    return std::accumulate(treated_.begin(), treated_.end(), 0ll);
}

long long ObservedTable::control_total() const {
    return std::accumulate(control_.begin(), control_.end(), 0ll);
}

std::vector<long long> ObservedTable::pooled_counts() const {
    std::vector<long long> pooled(treated_.size());
    for (size_t i = 0; i < treated_.size(); ++i) {
        pooled[i] = treated_[i] + control_[i];
    }
    return pooled;
}

std::string ObservedTable::to_csv_row() const {
    std::ostringstream os;
    os << categories();
    for (long long c : treated_) os << ',' << c;
    for (long long c : control_) os << ',' << c;
    return os.str();
}

ObservedTable ObservedTable::from_csv_row(const std::string& line) {
    std::vector<long long> fields;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            size_t used = 0;
            fields.push_back(std::stoll(item, &used));
            if (used != item.size()) {
                throw std::invalid_argument(item);
            }
        } catch (const std::exception&) {
            throw ParseError("invalid count '" + item + "' in observed-table row");
        }
    }
    if (fields.empty()) {
        throw ParseError("empty observed-table row");
    }
    const long long j = fields[0];
    if (j < 2 || static_cast<long long>(fields.size()) != 1 + 2 * j) {
        throw ParseError("observed-table row must have 1 + 2J fields");
    }
    std::vector<long long> treated(fields.begin() + 1, fields.begin() + 1 + j);
    std::vector<long long> control(fields.begin() + 1 + j, fields.end());
    return ObservedTable(std::move(treated), std::move(control));
}

ObservedTable observe(const FinitePopulation& pop, const Assignment& a) {
    if (static_cast<int>(a.treated.size()) != pop.size()) {
        throw SizeMismatch("assignment length " + std::to_string(a.treated.size()) +
                           " does not match population size " + std::to_string(pop.size()));
    }
    std::vector<long long> treated(pop.categories, 0), control(pop.categories, 0);
    for (int i = 0; i < pop.size(); ++i) {
        if (a.treated[i]) {
            ++treated[pop.units[i].y1];
        } else {
            ++control[pop.units[i].y0];
        }
    }
    return ObservedTable(std::move(treated), std::move(control));
}

std::int64_t u_squared(const ObservedTable& t) {
    return u_squared_of_counts(t.treated_counts(), t.control_counts());
}

std::uint64_t split_count(const std::vector<long long>& pooled, long long treated_total,
                          std::uint64_t cap) {
    const int j = static_cast<int>(pooled.size());
    std::vector<long long> suffix(j + 1, 0);
    for (int i = j - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1] + pooled[i];
    }
    std::uint64_t count = 0;
    auto recurse = [&](auto&& self, int cat, long long remaining) -> void {
        if (count > cap) {
            return;
        }
        if (cat == j - 1) {
            if (remaining >= 0 && remaining <= pooled[cat]) {
                ++count;
            }
            return;
        }
        const long long lo = std::max(0ll, remaining - suffix[cat + 1]);
        const long long hi = std::min(pooled[cat], remaining);
        for (long long t = lo; t <= hi && count <= cap; ++t) {
            self(self, cat + 1, remaining - t);
        }
    };
    recurse(recurse, 0, treated_total);
    return std::min(count, cap + 1);
}

ExactNullDistribution build_exact_null(const std::vector<long long>& pooled,
                                       long long treated_total) {
    const int j = static_cast<int>(pooled.size());
    const long long total = std::accumulate(pooled.begin(), pooled.end(), 0ll);
    if (treated_total <= 0 || treated_total >= total) {
        throw InvalidDesign("exact null requires 0 < n1 < N");
    }

    // binomial rows C(pooled[cat], t) for t = 0..pooled[cat]
    std::vector<std::vector<BigInt>> choose(j);
    for (int cat = 0; cat < j; ++cat) {
        choose[cat].resize(pooled[cat] + 1);
        choose[cat][0] = 1;
        for (long long t = 0; t < pooled[cat]; ++t) {
            choose[cat][t + 1] = choose[cat][t] * BigInt(pooled[cat] - t) / BigInt(t + 1);
        }
    }

    std::vector<long long> suffix(j + 1, 0);
    for (int i = j - 1; i >= 0; --i) {
        suffix[i] = suffix[i + 1] + pooled[i];
    }

    std::map<std::int64_t, BigInt> weight_by_u2;
    std::vector<long long> treated(j), control(j);
    std::vector<BigInt> weights(j + 1);
    weights[0] = 1;

    auto recurse = [&](auto&& self, int cat, long long remaining) -> void {
        if (cat == j - 1) {
            if (remaining < 0 || remaining > pooled[cat]) {
                return;
            }
            treated[cat] = remaining;
            control[cat] = pooled[cat] - remaining;
            const BigInt w = weights[cat] * choose[cat][remaining];
            weight_by_u2[u_squared_of_counts(treated, control)] += w;
            return;
        }
        const long long lo = std::max(0ll, remaining - suffix[cat + 1]);
        const long long hi = std::min(pooled[cat], remaining);
        for (long long t = lo; t <= hi; ++t) {
            treated[cat] = t;
            control[cat] = pooled[cat] - t;
            weights[cat + 1] = weights[cat] * choose[cat][t];
            self(self, cat + 1, remaining - t);
        }
    };
    recurse(recurse, 0, treated_total);

    ExactNullDistribution dist;
    dist.u2_values.reserve(weight_by_u2.size());
    dist.tail_weight.resize(weight_by_u2.size());
    for (const auto& [u2, w] : weight_by_u2) {
        dist.u2_values.push_back(u2);
    }
    BigInt running = 0;
    for (size_t i = weight_by_u2.size(); i-- > 0;) {
        running += weight_by_u2[dist.u2_values[i]];
        dist.tail_weight[i] = running;
    }
    dist.total_weight = running;
    return dist;
}

Rational ExactNullDistribution::tail_probability(std::int64_t u2_obs) const {
    const auto it = std::lower_bound(u2_values.begin(), u2_values.end(), u2_obs);
    if (it == u2_values.end()) {
        return Rational(0);
    }
    return Rational(tail_weight[it - u2_values.begin()], total_weight);
}

double randomization_p_value(const ObservedTable& t, int n1, int m, std::uint64_t seed) {
    if (m < 1) {
        throw InvalidDesign("need at least one null draw");
    }
    check_p_value_inputs(t, n1);
    const auto pooled = t.pooled_counts();
    const auto null_draws = sample_null_u2(pooled, n1, m, null_stream_seed(seed, pooled, n1));
    return add_one_p_value(null_draws, u_squared(t));
}

Rational exact_p_value_rational(const ObservedTable& t, int n1) {
    check_p_value_inputs(t, n1);
    return build_exact_null(t.pooled_counts(), n1).tail_probability(u_squared(t));
}

double exact_p_value(const ObservedTable& t, int n1) {
    return exact_p_value_rational(t, n1).to_double();
}

std::shared_ptr<const std::vector<std::int64_t>> NullDistributionCache::monte_carlo_null(
    const std::vector<long long>& pooled, long long n1, int draws,
    std::uint64_t root_seed) {
    const McKey key{root_seed, draws, n1, pooled};
    {
        std::lock_guard lock(mutex_);
        if (auto it = mc_.find(key); it != mc_.end()) {
            return it->second;
        }
    }
    auto built = std::make_shared<const std::vector<std::int64_t>>(
        sample_null_u2(pooled, n1, draws, null_stream_seed(root_seed, pooled, n1)));
    std::lock_guard lock(mutex_);
    return mc_.try_emplace(key, std::move(built)).first->second;
}

std::shared_ptr<const ExactNullDistribution> NullDistributionCache::exact_null(
    const std::vector<long long>& pooled, long long n1) {
    const ExactKey key{n1, pooled};
    {
        std::lock_guard lock(mutex_);
        if (auto it = exact_.find(key); it != exact_.end()) {
            return it->second;
        }
    }
    auto built = std::make_shared<const ExactNullDistribution>(build_exact_null(pooled, n1));
    std::lock_guard lock(mutex_);
    return exact_.try_emplace(key, std::move(built)).first->second;
}

double NullDistributionCache::p_value(const std::vector<long long>& pooled, long long n1,
                                      std::int64_t u2_obs, PValueMethod method,
                                      int null_draws, std::uint64_t root_seed) {
    PValueMethod resolved = method;
    if (method == PValueMethod::auto_select) {
        resolved = split_count(pooled, n1) <= kAutoExactSplitLimit ? PValueMethod::exact
                                                                   : PValueMethod::monte_carlo;
    }
    if (resolved == PValueMethod::exact) {
        return exact_null(pooled, n1)->tail_probability(u2_obs).to_double();
    }
    if (null_draws < 1) {
        throw InvalidDesign("need at least one null draw");
    }
    return add_one_p_value(*monte_carlo_null(pooled, n1, null_draws, root_seed), u2_obs);
}

}  // namespace ordinal
