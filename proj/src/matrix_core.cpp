#include "ordinal/matrix_core.hpp"

#include <cmath>

#include "ordinal/errors.hpp"

namespace ordinal {

namespace {

void validate_distribution(const std::vector<Rational>& p, const char* label) {
    if (p.size() < 2) {
        throw ValidationError(std::string(label) + ": need at least 2 categories");
    }
    Rational sum;
    for (const Rational& v : p) {
        if (v < Rational(0)) {
            throw ValidationError(std::string(label) + ": negative entry");
        }
        sum += v;
    }
    if (sum != Rational(1)) {
        throw ValidationError(std::string(label) + ": entries must sum to 1, got " +
                              sum.to_string());
    }
}

}  // namespace

MarginalPair MarginalPair::from_counts(int categories, long long denominator,
                                       const std::vector<long long>& treated_counts,
                                       const std::vector<long long>& control_counts) {
    if (denominator <= 0) {
        throw ValidationError("marginal denominator must be positive");
    }
    if (static_cast<int>(treated_counts.size()) != categories ||
        static_cast<int>(control_counts.size()) != categories) {
        throw ValidationError("marginal count vectors must have length J");
    }
    std::vector<Rational> p1, p0;
    p1.reserve(treated_counts.size());
    p0.reserve(control_counts.size());
    for (long long c : treated_counts) {
        p1.emplace_back(BigInt(c), BigInt(denominator));
    }
    for (long long c : control_counts) {
        p0.emplace_back(BigInt(c), BigInt(denominator));
    }
    return from_rationals(std::move(p1), std::move(p0));
}

MarginalPair MarginalPair::from_rationals(std::vector<Rational> treated,
                                          std::vector<Rational> control) {
    if (treated.size() != control.size()) {
        throw ValidationError("treatment and control marginals must have equal length");
    }
    validate_distribution(treated, "treatment marginals");
    validate_distribution(control, "control marginals");
    return MarginalPair(std::move(treated), std::move(control));
}

ProbMatrix ProbMatrix::from_rows(std::vector<std::vector<Rational>> rows) {
    const size_t j = rows.size();
    if (j < 2) {
        throw ValidationError("probability matrix: need at least 2 categories");
    }
    Rational sum;
    for (const auto& row : rows) {
        if (row.size() != j) {
            throw ValidationError("probability matrix: not square");
        }
        for (const Rational& v : row) {
            if (v < Rational(0)) {
                throw ValidationError("probability matrix: negative entry");
            }
            sum += v;
        }
    }
    if (sum != Rational(1)) {
        throw ValidationError("probability matrix: entries must sum to 1, got " +
                              sum.to_string());
    }
    return ProbMatrix(std::move(rows));
}

ProbMatrix ProbMatrix::diagonal(const std::vector<Rational>& diag) {
    std::vector<std::vector<Rational>> rows(diag.size(),
                                            std::vector<Rational>(diag.size(), Rational(0)));
    for (size_t k = 0; k < diag.size(); ++k) {
        rows[k][k] = diag[k];
    }
    return from_rows(std::move(rows));
}

Rational ProbMatrix::trace() const {
    Rational t;
    for (int k = 0; k < categories(); ++k) {
        t += rows_[k][k];
    }
    return t;
}

MarginalPair marginals(const ProbMatrix& m) {
    const int j = m.categories();
    std::vector<Rational> p1(j), p0(j);
    for (int k = 0; k < j; ++k) {
        for (int l = 0; l < j; ++l) {
            p1[k] += m.at(k, l);
            p0[l] += m.at(k, l);
        }
    }
    return MarginalPair::from_rationals(std::move(p1), std::move(p0));
}

double hellinger_distance(const MarginalPair& mp) {
    double sum = 0.0;
    for (int j = 0; j < mp.categories(); ++j) {
        double d = std::sqrt(mp.treated()[j].to_double()) -
                   std::sqrt(mp.control()[j].to_double());
        sum += d * d;
    }
    double v = std::sqrt(0.5 * sum);
    if (v < 0.0) return 0.0;
    if (v > 1.0) return 1.0;
    return v;
}

Rational agreement_by_chance(const MarginalPair& mp) {
    Rational c;
    for (int j = 0; j < mp.categories(); ++j) {
        c += mp.treated()[j] * mp.control()[j];
    }
    return c;
}

Rational cohens_kappa(const ProbMatrix& m) {
    const MarginalPair mp = marginals(m);
    const Rational c = agreement_by_chance(mp);
    if (c == Rational(1)) {
        throw DegenerateAgreement();
    }
    return (m.trace() - c) / (Rational(1) - c);
}

std::optional<int> dominance_violation_index(const MarginalPair& mp) {
    const int j = mp.categories();
    Rational tail1, tail0;
    // Accumulate upper tails from the top; check j = J-1 down to 1, then
    // report the smallest failing index.
    std::optional<int> worst;
    for (int idx = j - 1; idx >= 1; --idx) {
        tail1 += mp.treated()[idx];
        tail0 += mp.control()[idx];
        if (tail1 < tail0) {
            worst = idx;
        }
    }
    return worst;
}

bool check_stochastic_dominance(const MarginalPair& mp) {
    return !dominance_violation_index(mp).has_value();
}

}  // namespace ordinal
