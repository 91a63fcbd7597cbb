#include "ordinal/randomization.hpp"

#include <cmath>
#include <set>

#include "doctest.h"
#include "ordinal/errors.hpp"
#include "support/generators.hpp"

using namespace ordinal;

namespace {

Rational r(long long num, long long den) { return Rational(BigInt(num), BigInt(den)); }

// case 1 at n = 10, lambda = 1/2, calibrated: [[3,0],[3,4]]/10
CalibratedMatrix small_calibrated() {
    const auto mp = MarginalPair::from_counts(2, 10, {3, 7}, {6, 4});
    auto cal = calibrate(blend(mp, r(1, 2)), 10, r(1, 2));
    REQUIRE(cal.has_value());
    return *cal;
}

ObservedTable table(std::vector<long long> treated, std::vector<long long> control) {
    return ObservedTable(std::move(treated), std::move(control));
}

}  // namespace

TEST_CASE("population realizes the calibrated matrix exactly") {
    const FinitePopulation pop = population_from_matrix(small_calibrated());
    REQUIRE(pop.size() == 10);
    REQUIRE(pop.categories == 2);
    int c00 = 0, c10 = 0, c11 = 0;
    for (const Unit& u : pop.units) {
        if (u.y1 == 0 && u.y0 == 0) ++c00;
        if (u.y1 == 1 && u.y0 == 0) ++c10;
        if (u.y1 == 1 && u.y0 == 1) ++c11;
    }
    CHECK(c00 == 3);
    CHECK(c10 == 3);
    CHECK(c11 == 4);
    // canonical order: sorted by (y1, y0)
    for (int i = 1; i < pop.size(); ++i) {
        const auto key = [](const Unit& u) { return std::pair(u.y1, u.y0); };
        CHECK(key(pop.units[i - 1]) <= key(pop.units[i]));
    }
}

TEST_CASE("sharp-null populations have equal potential outcomes") {
    const auto mp = MarginalPair::from_counts(2, 10, {6, 4}, {6, 4});
    const auto cal = calibrate(maximizer_general(mp), 10, Rational(0));
    REQUIRE(cal.has_value());
    const FinitePopulation pop = population_from_matrix(*cal);
    for (const Unit& u : pop.units) {
        CHECK(u.y1 == u.y0);
    }
    // pooled counts are assignment-invariant under the sharp null
    const auto pooled = observe(pop, draw_assignment(10, 5, 1)).pooled_counts();
    for (std::uint64_t seed = 2; seed < 12; ++seed) {
        CHECK(observe(pop, draw_assignment(10, 5, seed)).pooled_counts() == pooled);
    }
}

TEST_CASE("assignments are deterministic, balanced, and uniform") {
    const Assignment a = draw_assignment(10, 4, 99);
    const Assignment b = draw_assignment(10, 4, 99);
    CHECK(a.treated == b.treated);
    CHECK(std::count(a.treated.begin(), a.treated.end(), 1) == 4);
    CHECK(draw_assignment(10, 4, 100).treated != a.treated);

    CHECK_THROWS_AS(draw_assignment(10, 0, 1), InvalidDesign);
    CHECK_THROWS_AS(draw_assignment(10, 10, 1), InvalidDesign);

    // two-point design: both assignments occur, about half the time each
    int first_treated = 0;
    for (std::uint64_t s = 0; s < 1000; ++s) {
        first_treated += draw_assignment(2, 1, s).treated[0];
    }
    CHECK(first_treated > 400);
    CHECK(first_treated < 600);

    // marginal inclusion probability of one unit: n1/n within 3 binomial SE
    const int draws = 100000;
    int unit0 = 0;
    for (int s = 0; s < draws; ++s) {
        unit0 += draw_assignment(10, 3, 7000 + s).treated[0];
    }
    const double freq = static_cast<double>(unit0) / draws;
    const double se = std::sqrt(0.3 * 0.7 / draws);
    CHECK(std::abs(freq - 0.3) < 3 * se);
}

TEST_CASE("observe counts outcomes by arm") {
    const FinitePopulation pop = population_from_matrix(small_calibrated());
    const Assignment a = draw_assignment(10, 5, 42);
    const ObservedTable t = observe(pop, a);

    // independent recount
    std::vector<long long> expect_treated(2, 0), expect_control(2, 0);
    for (int i = 0; i < 10; ++i) {
        if (a.treated[i]) {
            ++expect_treated[pop.units[i].y1];
        } else {
            ++expect_control[pop.units[i].y0];
        }
    }
    CHECK(t.treated_counts() == expect_treated);
    CHECK(t.control_counts() == expect_control);
    CHECK(t.treated_total() == 5);
    CHECK(t.control_total() == 5);

    Assignment wrong;
    wrong.treated.assign(7, 0);
    wrong.treated_count = 0;
    CHECK_THROWS_AS(observe(pop, wrong), SizeMismatch);

    // n1 = N - 1 leaves a single control unit
    const Assignment almost_all = draw_assignment(10, 9, 5);
    const ObservedTable one_left = observe(pop, almost_all);
    CHECK(one_left.control_total() == 1);
}

TEST_CASE("observed table validation and csv round trip") {
    CHECK_THROWS_AS(table({1, -1}, {0, 0}), ValidationError);
    CHECK_THROWS_AS(ObservedTable({1, 2}, {1}), ValidationError);
    CHECK_THROWS_AS(ObservedTable({3}, {2}), ValidationError);

    const ObservedTable t = table({1, 1}, {2, 0});
    CHECK(t.to_csv_row() == "2,1,1,2,0");
    CHECK(ObservedTable::from_csv_row("2,1,1,2,0") == t);
    CHECK(ObservedTable::from_csv_row("3,0,1,1,2,0,0") == table({0, 1, 1}, {2, 0, 0}));

    CHECK_THROWS_AS(ObservedTable::from_csv_row("2,1,1,2"), ParseError);
    CHECK_THROWS_AS(ObservedTable::from_csv_row("x,1,1,2,0"), ParseError);
    CHECK_THROWS_AS(ObservedTable::from_csv_row(""), ParseError);
}

TEST_CASE("u squared on frozen examples") {
    CHECK(u_squared(table({1, 1}, {1, 1})) == 0);
    CHECK(u_squared(table({0, 2}, {2, 0})) == 16);
    CHECK(u_squared(table({2, 0}, {0, 2})) == 16);
    CHECK(u_squared(table({0, 3}, {0, 2})) == 0);  // one category occupied
}

TEST_CASE("u squared hand-computed three-category example") {
    // treated (1,0,2), control (0,2,1):
    // k>l pairs contribute n1[2]*n0[1] = 4; the rest are zero
    // k<l pairs contribute n1[0]*n0[1] + n1[0]*n0[2] = 2 + 1 = 3
    // U = 4 - 3 = 1
    CHECK(u_squared(table({1, 0, 2}, {0, 2, 1})) == 1);
    // and its category-reversed counterpart
    CHECK(u_squared(table({2, 0, 1}, {1, 2, 0})) == 1);
}

TEST_CASE("u squared is invariant under simultaneous category reversal") {
    Rng rng(909);
    for (int i = 0; i < 200; ++i) {
        const int j = 2 + static_cast<int>(rng.below(3));
        std::vector<long long> a(j, 0), b(j, 0);
        for (int u = 0; u < 8; ++u) ++a[rng.below(j)];
        for (int u = 0; u < 8; ++u) ++b[rng.below(j)];
        std::vector<long long> ar(a.rbegin(), a.rend()), br(b.rbegin(), b.rend());
        CHECK(u_squared(table(a, b)) == u_squared(table(ar, br)));
    }
}

TEST_CASE("split counting") {
    CHECK(split_count({2, 2}, 2) == 3);
    CHECK(split_count({2, 2}, 2, 1) == 2);  // saturates at cap + 1
    CHECK(split_count({5, 5, 10}, 10) == 36);

    // cross-check against direct enumeration
    std::uint64_t direct = 0;
    for (int t0 = 0; t0 <= 5; ++t0) {
        for (int t1 = 0; t1 <= 5; ++t1) {
            const int t2 = 10 - t0 - t1;
            if (t2 >= 0 && t2 <= 10) ++direct;
        }
    }
    CHECK(split_count({5, 5, 10}, 10) == direct);
}

TEST_CASE("exact null distribution of the N=4 design") {
    const auto dist = build_exact_null({2, 2}, 2);
    CHECK(dist.total_weight == 6);  // C(4,2)
    CHECK(dist.u2_values == std::vector<std::int64_t>{0, 16});
    CHECK(dist.tail_probability(0) == Rational(1));
    CHECK(dist.tail_probability(1) == r(2, 6));
    CHECK(dist.tail_probability(16) == r(1, 3));
    CHECK(dist.tail_probability(17) == Rational(0));
}

TEST_CASE("exact p-value of the exhaustively enumerated design") {
    const ObservedTable t = table({0, 2}, {2, 0});  // U^2 = 16
    CHECK(exact_p_value_rational(t, 2) == r(1, 3));
    CHECK(exact_p_value(t, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("monte carlo p-value basics") {
    // observed U^2 = 0 gives p = 1 regardless of draws
    CHECK(randomization_p_value(table({1, 1}, {1, 1}), 2, 500, 3) == 1.0);
    // all observations in one category: U^2 = 0 everywhere, p = 1
    CHECK(randomization_p_value(table({0, 2}, {0, 3}), 2, 500, 3) == 1.0);

    CHECK_THROWS_AS(randomization_p_value(table({1, 1}, {1, 1}), 3, 500, 3),
                    InvalidDesign);
    CHECK_THROWS_AS(randomization_p_value(table({1, 1}, {1, 1}), 2, 0, 3), InvalidDesign);

    // converges to the exact enumeration value 1/3 within 3 MC SEs
    const ObservedTable t = table({0, 2}, {2, 0});
    const int m = 4000;
    const double p = randomization_p_value(t, 2, m, 17);
    const double se = std::sqrt((1.0 / 3.0) * (2.0 / 3.0) / m);
    CHECK(std::abs(p - 1.0 / 3.0) < 3 * se + 1.0 / (m + 1));
}

TEST_CASE("p-values depend on the observation only through pooled counts and u2") {
    const ObservedTable a = table({0, 2}, {2, 0});
    const ObservedTable b = table({2, 0}, {0, 2});
    REQUIRE(a.pooled_counts() == b.pooled_counts());
    REQUIRE(u_squared(a) == u_squared(b));
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        CHECK(randomization_p_value(a, 2, 999, seed) ==
              randomization_p_value(b, 2, 999, seed));
    }
    // and identical seeds reproduce identical p-values
    CHECK(randomization_p_value(a, 2, 999, 4) == randomization_p_value(a, 2, 999, 4));
}

TEST_CASE("monte carlo agrees with exact enumeration on random small tables") {
    Rng rng(1234);
    const int m = 2000;
    for (int i = 0; i < 12; ++i) {
        const int j = 2 + static_cast<int>(rng.below(2));
        const int n1 = 2 + static_cast<int>(rng.below(3));
        const int n0 = 2 + static_cast<int>(rng.below(3));
        std::vector<long long> treated(j, 0), control(j, 0);
        for (int u = 0; u < n1; ++u) ++treated[rng.below(j)];
        for (int u = 0; u < n0; ++u) ++control[rng.below(j)];
        const ObservedTable t = table(treated, control);
        const double exact = exact_p_value(t, n1);
        const double mc = randomization_p_value(t, n1, m, 1000 + i);
        const double se = std::sqrt(exact * (1 - exact) / m);
        CHECK(std::abs(mc - exact) <= 3 * se + 1.0 / (m + 1));
    }
}

TEST_CASE("null distribution cache is deterministic and method-aware") {
    const ObservedTable t = table({0, 2}, {2, 0});
    const auto pooled = t.pooled_counts();
    const std::int64_t u2 = u_squared(t);

    NullDistributionCache cache;
    const double p_mc = cache.p_value(pooled, 2, u2, PValueMethod::monte_carlo, 999, 5);
    CHECK(p_mc == randomization_p_value(t, 2, 999, 5));
    // memoized second lookup is identical
    CHECK(cache.p_value(pooled, 2, u2, PValueMethod::monte_carlo, 999, 5) == p_mc);

    const double p_exact = cache.p_value(pooled, 2, u2, PValueMethod::exact, 0, 5);
    CHECK(p_exact == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // tiny design resolves to exact in auto mode
    const double p_auto = cache.p_value(pooled, 2, u2, PValueMethod::auto_select, 999, 5);
    CHECK(p_auto == p_exact);
}

TEST_CASE("hypergeometric draws stay in range with correct mean") {
    Rng rng(55);
    const int population = 20, marked = 8, draws = 10;
    const int k_min = std::max(0, draws - (population - marked));
    const int k_max = std::min(marked, draws);
    double sum = 0;
    const int reps = 20000;
    for (int i = 0; i < reps; ++i) {
        const int k = hypergeometric_draw(rng, population, marked, draws);
        REQUIRE(k >= k_min);
        REQUIRE(k <= k_max);
        sum += k;
    }
    const double mean = sum / reps;
    const double expected = static_cast<double>(draws) * marked / population;  // 4
    const double var = draws * (8.0 / 20) * (12.0 / 20) * (10.0 / 19.0);
    const double se = std::sqrt(var / reps);
    CHECK(std::abs(mean - expected) < 4 * se);

    CHECK(hypergeometric_draw(rng, 5, 5, 3) == 3);   // forced support
    CHECK(hypergeometric_draw(rng, 5, 0, 3) == 0);
    CHECK_THROWS_AS(hypergeometric_draw(rng, 5, 6, 3), InvalidDesign);
}
