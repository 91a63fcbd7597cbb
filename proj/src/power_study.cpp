#include "ordinal/power_study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "ordinal/errors.hpp"

namespace ordinal {

namespace {

constexpr std::uint64_t kScenarioTag = 0x7363656e6172696full;   // "scenario"
constexpr std::uint64_t kReplicateTag = 0x7265706c69636174ull;  // "replicat"

int resolve_threads(int requested, int work_items) {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) {
        hw = 1;
    }
    const int t = requested > 0 ? requested : hw;
    return std::max(1, std::min(t, work_items));
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::uint64_t scenario_seed(std::uint64_t root, int case_id, int n, const Rational& lambda) {
    SeedChain chain(root);
    chain.absorb(kScenarioTag);
    chain.absorb(static_cast<std::uint64_t>(case_id));
    chain.absorb(static_cast<std::uint64_t>(n));
    chain.absorb(seed_digest(lambda.num()));
    chain.absorb(seed_digest(lambda.den()));
    return chain.seed();
}

}  // namespace

PowerResult estimate_power(const Scenario& s, const EngineOptions& opts) {
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) {
        throw ValidationError("alpha must lie strictly between 0 and 1");
    }
    if (s.replications < 1) {
        throw ValidationError("need at least one replication");
    }
    if (s.n1 <= 0 || s.n1 >= s.n) {
        throw InvalidDesign("treated count must satisfy 0 < n1 < n");
    }

    const Rational kappa_max = kappa_upper_bound(s.marginals);
    const Rational kappa = (Rational(1) - s.lambda) * kappa_max;
    const double tau = hellinger_distance(s.marginals);

    const ProbMatrix p_lambda = blend(s.marginals, s.lambda);
    auto calibrated = calibrate(p_lambda, s.n, s.lambda);
    if (!calibrated) {
        throw InfeasibleScenario("lambda = " + s.lambda.to_string() +
                                 " is not in the feasible set at n = " + std::to_string(s.n));
    }
    const FinitePopulation pop = population_from_matrix(*calibrated);

    NullDistributionCache cache;
    const int threads = resolve_threads(opts.threads, s.replications);
    std::vector<long long> rejected_by_thread(threads, 0);

    auto worker = [&](int tid, int begin, int end) {
        long long rejected = 0;
        for (int r = begin; r < end; ++r) {
            const std::uint64_t rep_seed =
                derive_seed(s.seed, {kReplicateTag, static_cast<std::uint64_t>(r)});
            const Assignment a = draw_assignment(s.n, s.n1, rep_seed);
            const ObservedTable table = observe(pop, a);
            const double p = cache.p_value(table.pooled_counts(), s.n1, u_squared(table),
                                           opts.method, s.null_draws, s.seed);
            if (p < s.alpha) {
                ++rejected;
            }
        }
        rejected_by_thread[tid] = rejected;
    };

    if (threads == 1) {
        worker(0, 0, s.replications);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (int tid = 0; tid < threads; ++tid) {
            const int begin = static_cast<int>(
                static_cast<long long>(s.replications) * tid / threads);
            const int end = static_cast<int>(
                static_cast<long long>(s.replications) * (tid + 1) / threads);
            pool.emplace_back(worker, tid, begin, end);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    long long rejected = 0;
    for (long long r : rejected_by_thread) {
        rejected += r;
    }

    PowerResult result;
    result.case_id = s.case_id;
    result.categories = s.marginals.categories();
    result.n = s.n;
    result.n1 = s.n1;
    result.lambda = s.lambda;
    result.kappa = kappa;
    result.tau_hd = tau;
    result.alpha = s.alpha;
    result.replications = s.replications;
    result.null_draws = s.null_draws;
    result.rejected = rejected;
    result.power = static_cast<double>(rejected) / s.replications;
    result.mc_se = std::sqrt(result.power * (1.0 - result.power) / s.replications);
    result.seed = s.seed;
    result.status = ScenarioStatus::ok;
    return result;
}

std::vector<PowerResult> run_scenario_grid(const std::vector<MarginalPair>& cases,
                                           const GridConfig& config) {
    std::vector<Rational> lambdas = config.lambdas;
    std::sort(lambdas.begin(), lambdas.end());
    lambdas.erase(std::unique(lambdas.begin(), lambdas.end()), lambdas.end());

    std::vector<PowerResult> out;
    for (size_t i = 0; i < cases.size(); ++i) {
        const int case_id = static_cast<int>(i) + 1;
        const MarginalPair& mp = cases[i];
        const Rational kappa_max = kappa_upper_bound(mp);
        const double tau = hellinger_distance(mp);
        for (int n : config.sample_sizes) {
            const int n1 = config.treated_count.value_or(n / 2);
            for (const Rational& lambda : lambdas) {
                Scenario s(mp);
                s.case_id = case_id;
                s.n = n;
                s.n1 = n1;
                s.lambda = lambda;
                s.alpha = config.alpha;
                s.replications = config.replications;
                s.null_draws = config.null_draws;
                s.seed = scenario_seed(config.seed, case_id, n, lambda);
                try {
                    out.push_back(estimate_power(s, config.engine));
                } catch (const InfeasibleScenario&) {
                    PowerResult skipped;
                    skipped.case_id = case_id;
                    skipped.categories = mp.categories();
                    skipped.n = n;
                    skipped.n1 = n1;
                    skipped.lambda = lambda;
                    skipped.kappa = (Rational(1) - lambda) * kappa_max;
                    skipped.tau_hd = tau;
                    skipped.alpha = config.alpha;
                    skipped.replications = config.replications;
                    skipped.null_draws = config.null_draws;
                    skipped.seed = s.seed;
                    skipped.status = ScenarioStatus::skipped_infeasible;
                    out.push_back(std::move(skipped));
                }
            }
        }
    }
    return out;
}

std::vector<Rational> canonical_lambda_grid() {
    return {Rational(0), Rational(BigInt(1), BigInt(4)), Rational(BigInt(1), BigInt(2)),
            Rational(BigInt(3), BigInt(4)), Rational(1)};
}

std::vector<PaperCase> paper_cases() {
    std::vector<PaperCase> cases;
    cases.push_back({MarginalPair::from_counts(2, 10, {3, 7}, {6, 4}), 0.216});
    cases.push_back({MarginalPair::from_counts(2, 10, {5, 5}, {8, 2}), 0.227});
    cases.push_back({MarginalPair::from_counts(3, 20, {5, 5, 10}, {8, 8, 4}), 0.227});
    cases.push_back({MarginalPair::from_counts(3, 40, {9, 9, 22}, {16, 16, 8}), 0.261});
    return cases;
}

std::string power_csv_header() {
    return "case_id,j,n,n1,lambda,kappa,tau_hd,alpha,replications,null_draws,power,mc_se,"
           "seed,status";
}

std::string power_csv_row(const PowerResult& r) {
    std::ostringstream os;
    os << r.case_id << ',' << r.categories << ',' << r.n << ',' << r.n1 << ','
       << r.lambda.to_decimal(6) << ',' << r.kappa.to_decimal(6) << ',' << fmt6(r.tau_hd)
       << ',' << fmt6(r.alpha) << ',' << r.replications << ',' << r.null_draws << ',';
    if (r.status == ScenarioStatus::ok) {
        os << fmt6(r.power) << ',' << fmt6(r.mc_se);
    } else {
        os << ',';
    }
    os << ',' << r.seed << ','
       << (r.status == ScenarioStatus::ok ? "ok" : "skipped_infeasible");
    return os.str();
}

void write_power_csv(std::ostream& os, const std::vector<PowerResult>& results) {
    os << power_csv_header() << '\n';
    for (const PowerResult& r : results) {
        os << power_csv_row(r) << '\n';
    }
}

namespace {

struct Check {
    std::string name;
    bool pass = true;
    std::string detail;
};

using RowKey = std::tuple<int, int, std::string>;  // case_id, n, lambda rendering

std::map<RowKey, const PowerResult*> index_rows(const std::vector<PowerResult>& rows) {
    std::map<RowKey, const PowerResult*> index;
    for (const PowerResult& r : rows) {
        index[{r.case_id, r.n, r.lambda.to_decimal(6)}] = &r;
    }
    return index;
}

double combined_se(const PowerResult& a, const PowerResult& b) {
    return std::sqrt(a.mc_se * a.mc_se + b.mc_se * b.mc_se);
}

bool both_ok(const PowerResult* a, const PowerResult* b) {
    return a && b && a->status == ScenarioStatus::ok && b->status == ScenarioStatus::ok;
}

Check check_case_dominance(const std::vector<PowerResult>& rows, int hi_case, int lo_case) {
    Check check;
    check.name = "hellinger_dominance_case" + std::to_string(hi_case) + "_over_case" +
                 std::to_string(lo_case);
    const auto index = index_rows(rows);
    for (const PowerResult& lo : rows) {
        if (lo.case_id != lo_case || lo.status != ScenarioStatus::ok) continue;
        const auto it = index.find({hi_case, lo.n, lo.lambda.to_decimal(6)});
        const PowerResult* hi = it == index.end() ? nullptr : it->second;
        if (!both_ok(hi, &lo)) continue;
        if (hi->power < lo.power - 2.0 * combined_se(*hi, lo)) {
            check.pass = false;
            check.detail = "n=" + std::to_string(lo.n) + " lambda=" + lo.lambda.to_string() +
                           ": " + fmt6(hi->power) + " < " + fmt6(lo.power) + " - 2se";
            return check;
        }
    }
    return check;
}

Check check_lambda_monotonicity(const std::vector<PowerResult>& rows) {
    Check check;
    check.name = "lambda_monotonicity";
    // rows are ordered by (case, n, lambda); compare consecutive ok rows
    for (size_t i = 1; i < rows.size(); ++i) {
        const PowerResult& prev = rows[i - 1];
        const PowerResult& cur = rows[i];
        if (cur.case_id != prev.case_id || cur.n != prev.n) continue;
        if (prev.status != ScenarioStatus::ok || cur.status != ScenarioStatus::ok) continue;
        if (cur.power < prev.power - 2.0 * combined_se(cur, prev)) {
            check.pass = false;
            check.detail = "case " + std::to_string(cur.case_id) + " n=" +
                           std::to_string(cur.n) + ": power(" + cur.lambda.to_string() +
                           ")=" + fmt6(cur.power) + " < power(" + prev.lambda.to_string() +
                           ")=" + fmt6(prev.power) + " - 2se";
            return check;
        }
    }
    return check;
}

Check check_n_monotonicity(const std::vector<PowerResult>& rows,
                           const std::vector<int>& sample_sizes) {
    Check check;
    check.name = "sample_size_monotonicity";
    const auto index = index_rows(rows);
    for (const PowerResult& r : rows) {
        if (r.status != ScenarioStatus::ok) continue;
        // find the next larger n for the same case and lambda
        for (size_t i = 0; i + 1 < sample_sizes.size(); ++i) {
            if (sample_sizes[i] != r.n) continue;
            const auto it = index.find({r.case_id, sample_sizes[i + 1], r.lambda.to_decimal(6)});
            const PowerResult* next = it == index.end() ? nullptr : it->second;
            if (!both_ok(next, &r)) continue;
            if (next->power < r.power - 2.0 * combined_se(*next, r)) {
                check.pass = false;
                check.detail = "case " + std::to_string(r.case_id) + " lambda=" +
                               r.lambda.to_string() + ": power(n=" +
                               std::to_string(next->n) + ")=" + fmt6(next->power) +
                               " < power(n=" + std::to_string(r.n) + ")=" + fmt6(r.power) +
                               " - 2se";
                return check;
            }
        }
    }
    return check;
}

Check check_tau_values(const std::vector<PowerResult>& rows,
                       const std::vector<PaperCase>& cases) {
    Check check;
    check.name = "tau_hd_values";
    for (const PowerResult& r : rows) {
        const double expected = cases[r.case_id - 1].tau_hd;
        if (std::abs(r.tau_hd - expected) >= 5e-4) {
            check.pass = false;
            check.detail = "case " + std::to_string(r.case_id) + ": tau_hd=" +
                           fmt6(r.tau_hd) + " expected " + fmt6(expected);
            return check;
        }
    }
    return check;
}

Check check_kappa_identity(const std::vector<PowerResult>& rows,
                           const std::vector<PaperCase>& cases) {
    Check check;
    check.name = "kappa_affine_identity";
    for (const PowerResult& r : rows) {
        const MarginalPair& mp = cases[r.case_id - 1].marginals;
        const Rational via_matrix = cohens_kappa(blend(mp, r.lambda));
        if (via_matrix != r.kappa) {
            check.pass = false;
            check.detail = "case " + std::to_string(r.case_id) + " lambda=" +
                           r.lambda.to_string() + ": kappa(blend)=" + via_matrix.to_string() +
                           " reported " + r.kappa.to_string();
            return check;
        }
    }
    return check;
}

}  // namespace

std::vector<PowerResult> reproduce_paper(const std::string& out_dir,
                                         const ReproduceOptions& opts) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    const std::vector<PaperCase> cases = paper_cases();
    std::vector<MarginalPair> marginals;
    for (const PaperCase& c : cases) {
        marginals.push_back(c.marginals);
    }

    GridConfig config;
    config.sample_sizes = {120, 160, 240};
    config.lambdas = canonical_lambda_grid();
    config.alpha = opts.alpha;
    config.replications = opts.paper_fidelity ? 200'000 : opts.replications;
    config.null_draws = opts.null_draws;
    config.seed = opts.seed;
    config.engine.threads = opts.threads;

    const std::vector<PowerResult> results = run_scenario_grid(marginals, config);

    for (size_t i = 0; i < cases.size(); ++i) {
        const int case_id = static_cast<int>(i) + 1;
        std::ofstream out(fs::path(out_dir) / ("case_" + std::to_string(case_id) + ".csv"),
                          std::ios::binary);
        if (!out) {
            throw Error("cannot write to output directory " + out_dir);
        }
        out << power_csv_header() << '\n';
        for (const PowerResult& r : results) {
            if (r.case_id == case_id) {
                out << power_csv_row(r) << '\n';
            }
        }
    }

    std::vector<Check> checks;
    checks.push_back(check_tau_values(results, cases));
    checks.push_back(check_kappa_identity(results, cases));
    checks.push_back(check_case_dominance(results, 2, 1));
    checks.push_back(check_case_dominance(results, 4, 3));
    checks.push_back(check_lambda_monotonicity(results));
    checks.push_back(check_n_monotonicity(results, config.sample_sizes));

    long long ok_rows = 0, skipped_rows = 0;
    for (const PowerResult& r : results) {
        (r.status == ScenarioStatus::ok ? ok_rows : skipped_rows) += 1;
    }

    std::ofstream summary(fs::path(out_dir) / "summary.txt", std::ios::binary);
    if (!summary) {
        throw Error("cannot write to output directory " + out_dir);
    }
    summary << "study grid: " << cases.size() << " cases x N in {120,160,240}"
            << " x lambda in {0,1/4,1/2,3/4,1}\n";
    summary << "replications=" << config.replications << " null_draws=" << config.null_draws
            << " alpha=" << fmt6(config.alpha) << " seed=" << config.seed << "\n";
    summary << "rows_ok=" << ok_rows << " rows_skipped=" << skipped_rows << "\n\n";
    bool all_pass = true;
    for (const Check& c : checks) {
        summary << c.name << ": " << (c.pass ? "PASS" : "FAIL");
        if (!c.pass) {
            summary << " (" << c.detail << ")";
            all_pass = false;
        }
        summary << "\n";
    }
    summary << "\noverall: " << (all_pass ? "PASS" : "FAIL") << "\n";

    return results;
}

}  // namespace ordinal
