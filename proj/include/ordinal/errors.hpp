#pragma once

#include <stdexcept>
#include <string>

namespace ordinal {

// Base class for all domain errors raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Cohen's kappa is undefined: both marginals put all mass on one shared
// category, so the chance-agreement term equals 1.
struct DegenerateAgreement : Error {
    DegenerateAgreement()
        : Error("cohens kappa undefined: marginal inner product equals 1") {}
};

// The marginals do not satisfy stochastic dominance of the treatment arm
// over the control arm. `tail_index` is the smallest upper-tail index j
// (1..J-1) at which the dominance inequality fails.
struct DominanceViolated : Error {
    int tail_index;
    explicit DominanceViolated(int j)
        : Error("stochastic dominance violated at tail index j = " + std::to_string(j)),
          tail_index(j) {}
};

struct WrongDimension : Error {
    explicit WrongDimension(const std::string& what) : Error(what) {}
};

struct LambdaOutOfRange : Error {
    LambdaOutOfRange() : Error("lambda must lie in [0, 1]") {}
};

// N times a marginal entry is not an integer: the marginals do not live on
// the 1/N lattice required for finite-population calibration.
struct LatticeViolation : Error {
    explicit LatticeViolation(const std::string& what) : Error(what) {}
};

struct InvalidDesign : Error {
    explicit InvalidDesign(const std::string& what) : Error(what) {}
};

struct SizeMismatch : Error {
    explicit SizeMismatch(const std::string& what) : Error(what) {}
};

// The scenario's lambda is not in the feasible set Lambda(p1, p0) at this N.
struct InfeasibleScenario : Error {
    explicit InfeasibleScenario(const std::string& what) : Error(what) {}
};

// Invalid construction of a domain value (negative entry, wrong sum, ...).
struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(what) {}
};

// Malformed input file, config, or JSON document.
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(what) {}
};

}  // namespace ordinal
