#include "ordinal/construction.hpp"

#include <algorithm>

#include "ordinal/errors.hpp"

namespace ordinal {

ProbMatrix independent_minimizer(const MarginalPair& mp) {
    const int j = mp.categories();
    std::vector<std::vector<Rational>> rows(j, std::vector<Rational>(j));
    for (int k = 0; k < j; ++k) {
        for (int l = 0; l < j; ++l) {
            rows[k][l] = mp.treated()[k] * mp.control()[l];
        }
    }
    return ProbMatrix::from_rows(std::move(rows));
}

Rational kappa_upper_bound(const MarginalPair& mp) {
    const Rational c = agreement_by_chance(mp);
    if (c == Rational(1)) {
        throw DegenerateAgreement();
    }
    Rational sum_min;
    for (int k = 0; k < mp.categories(); ++k) {
        sum_min += min(mp.treated()[k], mp.control()[k]);
    }
    return (sum_min - c) / (Rational(1) - c);
}

ProbMatrix maximizer_general(const MarginalPair& mp) {
    if (auto bad = dominance_violation_index(mp)) {
        throw DominanceViolated(*bad);
    }
    const int j = mp.categories();
    const auto& p1 = mp.treated();
    const auto& p0 = mp.control();

    std::vector<std::vector<Rational>> rows(j, std::vector<Rational>(j, Rational(0)));
    std::vector<Rational> row_remaining(p1.begin(), p1.end());

    // Columns right to left. Row `col` is untouched until its own column is
    // reached, so its remaining mass is still the full row sum there.
    for (int col = j - 1; col >= 0; --col) {
        const Rational diag = min(p1[col], p0[col]);
        rows[col][col] = diag;
        row_remaining[col] -= diag;

        const Rational balance = p0[col] - diag;
        if (balance.is_zero()) {
            continue;
        }
        Rational below;
        for (int k = col + 1; k < j; ++k) {
            below += row_remaining[k];
        }
        if (below.is_zero()) {
            throw Error("maximizer: no remaining mass below row " + std::to_string(col) +
                        " to absorb a nonzero column balance");
        }
        for (int k = col + 1; k < j; ++k) {
            const Rational share = row_remaining[k] / below * balance;
            rows[k][col] = share;
            row_remaining[k] -= share;
        }
    }
    return ProbMatrix::from_rows(std::move(rows));
}

ProbMatrix maximizer_j2(const MarginalPair& mp) {
    if (mp.categories() != 2) {
        throw WrongDimension("maximizer_j2 requires J = 2, got J = " +
                             std::to_string(mp.categories()));
    }
    if (auto bad = dominance_violation_index(mp)) {
        throw DominanceViolated(*bad);
    }
    const auto& p1 = mp.treated();
    const auto& p0 = mp.control();
    return ProbMatrix::from_rows({{p1[0], Rational(0)},
                                  {p1[1] - p0[1], p0[1]}});
}

ProbMatrix maximizer_j3(const MarginalPair& mp) {
    if (mp.categories() != 3) {
        throw WrongDimension("maximizer_j3 requires J = 3, got J = " +
                             std::to_string(mp.categories()));
    }
    if (auto bad = dominance_violation_index(mp)) {
        throw DominanceViolated(*bad);
    }
    const auto& p1 = mp.treated();
    const auto& p0 = mp.control();
    const Rational mid = min(p0[1], p1[1]);
    return ProbMatrix::from_rows(
        {{p1[0], Rational(0), Rational(0)},
         {p1[1] - mid, mid, Rational(0)},
         {p1[2] - p0[2] - (p0[1] - mid), p0[1] - mid, p0[2]}});
}

namespace {

ProbMatrix blend_of(const ProbMatrix& minimizer, const ProbMatrix& maximizer,
                    const Rational& lambda) {
    const int j = minimizer.categories();
    const Rational keep = Rational(1) - lambda;
    std::vector<std::vector<Rational>> rows(j, std::vector<Rational>(j));
    for (int k = 0; k < j; ++k) {
        for (int l = 0; l < j; ++l) {
            rows[k][l] = lambda * minimizer.at(k, l) + keep * maximizer.at(k, l);
        }
    }
    return ProbMatrix::from_rows(std::move(rows));
}

void require_lambda_in_range(const Rational& lambda) {
    if (lambda < Rational(0) || lambda > Rational(1)) {
        throw LambdaOutOfRange();
    }
}

}  // namespace

ProbMatrix blend(const MarginalPair& mp, const Rational& lambda) {
    require_lambda_in_range(lambda);
    return blend_of(independent_minimizer(mp), maximizer_general(mp), lambda);
}

std::optional<CalibratedMatrix> calibrate(const ProbMatrix& blend_matrix, int n,
                                          const Rational& lambda) {
    if (n < 1) {
        throw ValidationError("calibration requires a positive population size");
    }
    const int j = blend_matrix.categories();
    const MarginalPair mp = marginals(blend_matrix);
    const Rational big_n(n);

    auto on_lattice = [&](const Rational& p) { return (p * big_n).is_integer(); };
    for (int idx = 0; idx < j; ++idx) {
        if (!on_lattice(mp.treated()[idx]) || !on_lattice(mp.control()[idx])) {
            throw LatticeViolation("marginals are not multiples of 1/" + std::to_string(n));
        }
    }

    std::vector<std::vector<Rational>> rows(j, std::vector<Rational>(j, Rational(0)));
    for (int l = 0; l < j; ++l) {
        Rational floored_total;
        for (int k = 0; k < j; ++k) {
            if (k == l) continue;
            const Rational entry((blend_matrix.at(k, l) * big_n).floor(), BigInt(n));
            rows[k][l] = entry;
            floored_total += entry;
        }
        rows[l][l] = mp.control()[l] - floored_total;
    }

    for (int k = 0; k < j; ++k) {
        Rational row_sum;
        for (int l = 0; l < j; ++l) {
            row_sum += rows[k][l];
        }
        if (row_sum != mp.treated()[k]) {
            return std::nullopt;
        }
    }
    return CalibratedMatrix{ProbMatrix::from_rows(std::move(rows)), n, lambda};
}

std::vector<CalibratedMatrix> feasible_lambda_set(const MarginalPair& mp, int n,
                                                  const std::vector<Rational>& grid) {
    std::vector<Rational> lambdas = grid;
    for (const Rational& l : lambdas) {
        require_lambda_in_range(l);
    }
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    const ProbMatrix minimizer = independent_minimizer(mp);
    const ProbMatrix maximizer = maximizer_general(mp);

    std::vector<CalibratedMatrix> feasible;
    for (const Rational& lambda : lambdas) {
        auto cal = calibrate(blend_of(minimizer, maximizer, lambda), n, lambda);
        if (cal) {
            feasible.push_back(std::move(*cal));
        }
    }
    return feasible;
}

std::vector<Rational> default_lambda_grid() {
    std::vector<Rational> grid;
    grid.reserve(101);
    for (int i = 0; i <= 100; ++i) {
        grid.emplace_back(BigInt(i), BigInt(100));
    }
    return grid;
}

}  // namespace ordinal
