#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ordinal/randomization.hpp"

namespace ordinal {

// One power-estimation configuration: a marginal pair pushed to departure
// (lambda from the kappa maximizer toward independence), realized as a
// finite population of n units, tested with the U^2 randomization test.
struct Scenario {
    explicit Scenario(MarginalPair mp) : marginals(std::move(mp)) {}

    MarginalPair marginals;
    int case_id = 0;
    int n = 0;
    int n1 = 0;
    Rational lambda;
    double alpha = 0.05;
    int replications = 10'000;
    int null_draws = 2'000;
    std::uint64_t seed = 0;
};

struct EngineOptions {
    PValueMethod method = PValueMethod::monte_carlo;
    int threads = 0;  // 0: hardware concurrency
};

enum class ScenarioStatus { ok, skipped_infeasible };

struct PowerResult {
    int case_id = 0;
    int categories = 0;
    int n = 0;
    int n1 = 0;
    Rational lambda;
    Rational kappa;  // (1 - lambda) * kappa_upper_bound, exact
    double tau_hd = 0.0;
    double alpha = 0.0;
    int replications = 0;
    int null_draws = 0;
    long long rejected = 0;
    double power = 0.0;
    double mc_se = 0.0;
    std::uint64_t seed = 0;
    ScenarioStatus status = ScenarioStatus::ok;
};

// Builds the calibrated population once, then for each replicate draws an
// assignment, observes the outcome table, and tests the sharp null via the
// U^2 p-value; power is the fraction of replicates with p < alpha.
// Deterministic given the scenario seed, independent of thread count.
// Throws InfeasibleScenario when lambda calibrates infeasibly at this n.
PowerResult estimate_power(const Scenario& s, const EngineOptions& opts = {});

struct GridConfig {
    std::vector<int> sample_sizes{120, 160, 240};
    std::vector<Rational> lambdas;
    double alpha = 0.05;
    int replications = 10'000;
    int null_draws = 2'000;
    std::uint64_t seed = 0;
    std::optional<int> treated_count;  // nullopt: balanced n/2
    EngineOptions engine;
};

// Cross product of cases x sample sizes x lambdas, ordered by
// (case, n, lambda). Infeasible lambdas become skipped rows, not errors.
// Scenario seeds are derived from (seed, case index, n, lambda).
std::vector<PowerResult> run_scenario_grid(const std::vector<MarginalPair>& cases,
                                           const GridConfig& config);

// {0, 1/4, 1/2, 3/4, 1}
std::vector<Rational> canonical_lambda_grid();

struct PaperCase {
    MarginalPair marginals;
    double tau_hd;  // reference Hellinger distance, 3 decimals
};

// The four study cases: two binary and two three-level marginal pairs with
// Hellinger distances 0.216, 0.227, 0.227, 0.261.
std::vector<PaperCase> paper_cases();

// CSV schema:
// case_id,j,n,n1,lambda,kappa,tau_hd,alpha,replications,null_draws,power,mc_se,seed,status
std::string power_csv_header();
std::string power_csv_row(const PowerResult& r);
void write_power_csv(std::ostream& os, const std::vector<PowerResult>& results);

struct ReproduceOptions {
    int replications = 10'000;
    int null_draws = 2'000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;
    bool paper_fidelity = false;  // raises replications to 200000
};

// Runs the full study grid (4 cases x {120,160,240} x {0,1/4,1/2,3/4,1}),
// writes case_1.csv .. case_4.csv plus summary.txt into out_dir, and returns
// the results. Output is byte-deterministic given the seed.
std::vector<PowerResult> reproduce_paper(const std::string& out_dir,
                                         const ReproduceOptions& opts);

}  // namespace ordinal
