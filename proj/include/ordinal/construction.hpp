#pragma once

#include <optional>
#include <vector>

#include "ordinal/matrix_core.hpp"

namespace ordinal {

// A probability matrix whose entries are all multiples of 1/n, i.e. one that
// is realizable by a finite population of n units, together with the
// sensitivity parameter lambda it was calibrated at.
struct CalibratedMatrix {
    ProbMatrix matrix;
    int n;
    Rational lambda;
};

// Outer product of the marginals: independent potential outcomes. Kappa of
// the result is exactly zero (the minimum over nonnegatively associated
// joint distributions).
ProbMatrix independent_minimizer(const MarginalPair& mp);

// Maximum attainable kappa for the given marginals:
// (sum_k min(p1[k], p0[k]) - p1'p0) / (1 - p1'p0).
// Throws DegenerateAgreement when p1'p0 == 1.
Rational kappa_upper_bound(const MarginalPair& mp);

// Lower-triangular joint distribution attaining kappa_upper_bound, built by
// filling columns from the last to the first: the diagonal entry of each
// column is the min of its row and column sums, and the remaining column
// balance is split over the rows below in proportion to their unfilled
// mass. Requires stochastic dominance (throws DominanceViolated otherwise).
ProbMatrix maximizer_general(const MarginalPair& mp);

// Closed forms of the unique maximizer for J = 2 and J = 3. These are
// independent of maximizer_general and serve as oracles for it.
ProbMatrix maximizer_j2(const MarginalPair& mp);
ProbMatrix maximizer_j3(const MarginalPair& mp);

// Convex combination lambda * minimizer + (1 - lambda) * maximizer.
// Preserves the marginals; kappa of the blend is (1 - lambda) times
// kappa_upper_bound, exactly.
ProbMatrix blend(const MarginalPair& mp, const Rational& lambda);

// Push a blend matrix onto the 1/n lattice: off-diagonal entries are floored
// to multiples of 1/n and each diagonal entry absorbs the mass floored away
// from its column, so column sums are preserved by construction. Returns
// nullopt ("infeasible", a normal outcome) when the row sums no longer equal
// the treatment marginals; throws LatticeViolation if the marginals
// themselves are not multiples of 1/n.
std::optional<CalibratedMatrix> calibrate(const ProbMatrix& blend_matrix, int n,
                                          const Rational& lambda);

// Calibrate the blend at every grid point and keep the feasible ones,
// in increasing lambda. The set of returned lambdas approximates the
// feasible set of the marginal pair at population size n.
std::vector<CalibratedMatrix> feasible_lambda_set(const MarginalPair& mp, int n,
                                                  const std::vector<Rational>& grid);

// i/100 for i = 0..100.
std::vector<Rational> default_lambda_grid();

}  // namespace ordinal
