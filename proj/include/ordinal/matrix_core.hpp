#pragma once

#include <optional>
#include <vector>

#include "ordinal/rational.hpp"

namespace ordinal {

// Marginal distributions of the potential outcomes over J ordered categories
// (0 = worst, J-1 = best): p1 for the treatment arm, p0 for the control arm.
// Entries are nonnegative exact rationals summing to one per arm.
class MarginalPair {
public:
    // Counts over a common denominator, e.g. from_counts(2, 10, {3,7}, {6,4})
    // builds p1 = (3/10, 7/10), p0 = (3/5, 2/5).
    static MarginalPair from_counts(int categories, long long denominator,
                                    const std::vector<long long>& treated_counts,
                                    const std::vector<long long>& control_counts);
    static MarginalPair from_rationals(std::vector<Rational> treated,
                                       std::vector<Rational> control);

    int categories() const { return static_cast<int>(treated_.size()); }
    const std::vector<Rational>& treated() const { return treated_; }
    const std::vector<Rational>& control() const { return control_; }

    friend bool operator==(const MarginalPair& a, const MarginalPair& b) {
        return a.treated_ == b.treated_ && a.control_ == b.control_;
    }

private:
    MarginalPair(std::vector<Rational> treated, std::vector<Rational> control)
        : treated_(std::move(treated)), control_(std::move(control)) {}

    std::vector<Rational> treated_;
    std::vector<Rational> control_;
};

// Joint distribution of the potential-outcome pair: entry (k, l) is the
// probability of outcome k under treatment and l under control. Entries are
// nonnegative exact rationals summing to one.
class ProbMatrix {
public:
    static ProbMatrix from_rows(std::vector<std::vector<Rational>> rows);
    static ProbMatrix diagonal(const std::vector<Rational>& diag);

    int categories() const { return static_cast<int>(rows_.size()); }
    const Rational& at(int k, int l) const { return rows_[k][l]; }
    const std::vector<std::vector<Rational>>& rows() const { return rows_; }

    Rational trace() const;

    friend bool operator==(const ProbMatrix& a, const ProbMatrix& b) {
        return a.rows_ == b.rows_;
    }

private:
    explicit ProbMatrix(std::vector<std::vector<Rational>> rows) : rows_(std::move(rows)) {}

    std::vector<std::vector<Rational>> rows_;
};

// Row sums (treatment marginals) and column sums (control marginals).
MarginalPair marginals(const ProbMatrix& m);

// Hellinger distance between the two marginal vectors, in [0, 1]. Zero
// exactly when the marginals coincide; the only floating-point quantity in
// this module (it involves square roots).
double hellinger_distance(const MarginalPair& mp);

// Inner product p1'p0, the chance-agreement term of Cohen's kappa.
Rational agreement_by_chance(const MarginalPair& mp);

// Cohen's kappa (tr(P) - p1'p0) / (1 - p1'p0), exact.
// Throws DegenerateAgreement when p1'p0 == 1.
Rational cohens_kappa(const ProbMatrix& m);

// True iff every upper tail of the treatment marginal weakly dominates the
// control's: sum_{k>=j} p1[k] >= sum_{l>=j} p0[l] for j = 1..J-1.
bool check_stochastic_dominance(const MarginalPair& mp);

// Smallest failing tail index j in 1..J-1, or nullopt if dominance holds.
std::optional<int> dominance_violation_index(const MarginalPair& mp);

}  // namespace ordinal
