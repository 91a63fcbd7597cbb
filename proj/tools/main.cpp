#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ordinal/errors.hpp"
#include "ordinal/json_io.hpp"
#include "ordinal/power_study.hpp"

namespace {

using nlohmann::json;

// Exit codes: 0 success, 2 input/config error, 3 infeasible lambda.
constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitInfeasible = 3;

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ordinal::Error("cannot open output file " + path);
    }
    out << content;
}

ordinal::PValueMethod parse_method(const std::string& name) {
    if (name == "mc" || name == "monte-carlo") return ordinal::PValueMethod::monte_carlo;
    if (name == "exact") return ordinal::PValueMethod::exact;
    if (name == "auto") return ordinal::PValueMethod::auto_select;
    throw ordinal::ParseError("unknown p-value method '" + name + "'");
}

std::vector<ordinal::Rational> parse_lambdas(const std::vector<std::string>& raw) {
    std::vector<ordinal::Rational> lambdas;
    lambdas.reserve(raw.size());
    for (const std::string& s : raw) {
        lambdas.push_back(ordinal::Rational::parse(s));
    }
    return lambdas;
}


std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) {
        return "";
    }
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

// Flat key=value config files; '#' starts a comment. Values on the command
// line take precedence over the file.
std::map<std::string, std::string> parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ordinal::ParseError("cannot open config file " + path);
    }
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ordinal::ParseError("config line " + std::to_string(lineno) +
                                      ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ordinal::ParseError("config line " + std::to_string(lineno) +
                                      ": empty key");
        }
        kv[key] = value;
    }
    return kv;
}

struct ConfigBinding {
    std::string key;
    CLI::Option* flag;  // skip the file value when the flag was given
    std::function<void(const std::string&)> apply;
};

void apply_config(const std::string& path, const std::vector<ConfigBinding>& bindings) {
    if (path.empty()) {
        return;
    }
    for (const auto& [key, value] : parse_config_file(path)) {
        const auto it =
            std::find_if(bindings.begin(), bindings.end(),
                         [&](const ConfigBinding& b) { return b.key == key; });
        if (it == bindings.end()) {
            throw ordinal::ParseError("unknown config key '" + key + "'");
        }
        if (it->flag->count() == 0) {
            it->apply(value);
        }
    }
}

long long parse_ll(const std::string& value, const std::string& key) {
    try {
        size_t used = 0;
        const long long v = std::stoll(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ordinal::ParseError("config value for '" + key + "' must be an integer");
    }
}

std::uint64_t parse_u64(const std::string& value, const std::string& key) {
    try {
        size_t used = 0;
        const unsigned long long v = std::stoull(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ordinal::ParseError("config value for '" + key +
                                  "' must be an unsigned integer");
    }
}

double parse_d(const std::string& value, const std::string& key) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) {
            throw std::invalid_argument(value);
        }
        return v;
    } catch (const std::exception&) {
        throw ordinal::ParseError("config value for '" + key + "' must be a number");
    }
}

bool parse_bool(const std::string& value, const std::string& key) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ordinal::ParseError("config value for '" + key + "' must be a boolean");
}

struct ConstructArgs {
    std::string config_path;
    std::string marginals_path;
    std::string lambda_text = "0";
    int n = 0;
    std::string out_path;
};

int cmd_construct(const ConstructArgs& args) {
    const ordinal::MarginalPair mp = ordinal::load_marginal_pair(args.marginals_path);
    const ordinal::Rational lambda = ordinal::Rational::parse(args.lambda_text);

    const ordinal::ProbMatrix minimizer = ordinal::independent_minimizer(mp);
    const ordinal::ProbMatrix maximizer = ordinal::maximizer_general(mp);
    const ordinal::Rational kappa_upper = ordinal::kappa_upper_bound(mp);
    const ordinal::ProbMatrix blended = ordinal::blend(mp, lambda);
    const ordinal::Rational kappa_blend = ordinal::cohens_kappa(blended);

    auto calibrated = ordinal::calibrate(blended, args.n, lambda);
    if (!calibrated) {
        std::cerr << "infeasible: lambda = " << lambda.to_string()
                  << " is not in the feasible set at n = " << args.n << "\n";
        return kExitInfeasible;
    }

    json doc;
    doc["marginals"] = ordinal::to_json(mp);
    doc["n"] = args.n;
    doc["lambda_num"] = lambda.num().convert_to<long long>();
    doc["lambda_den"] = lambda.den().convert_to<long long>();
    doc["tau_hd"] = ordinal::hellinger_distance(mp);
    doc["kappa_upper_num"] = kappa_upper.num().convert_to<long long>();
    doc["kappa_upper_den"] = kappa_upper.den().convert_to<long long>();
    doc["kappa_blend_num"] = kappa_blend.num().convert_to<long long>();
    doc["kappa_blend_den"] = kappa_blend.den().convert_to<long long>();
    doc["minimizer"] = ordinal::to_json(minimizer);
    doc["maximizer"] = ordinal::to_json(maximizer);
    doc["blend"] = ordinal::to_json(blended);
    doc["calibrated"] = ordinal::to_json(*calibrated);

    write_output(args.out_path, doc.dump(2) + "\n");
    return kExitOk;
}

struct PowerArgs {
    std::string config_path;
    std::vector<std::string> marginals_paths;
    bool use_paper_cases = false;
    std::vector<int> sample_sizes{120, 160, 240};
    std::vector<std::string> lambda_texts{"0", "1/4", "1/2", "3/4", "1"};
    double alpha = 0.05;
    int replications = 10'000;
    int null_draws = 2'000;
    std::uint64_t seed = 0;
    int n1 = 0;  // 0: balanced n/2
    int threads = 0;
    std::string method = "mc";
    std::string out_path;
};

int cmd_power(const PowerArgs& args) {
    std::vector<ordinal::MarginalPair> cases;
    if (args.use_paper_cases) {
        for (const ordinal::PaperCase& c : ordinal::paper_cases()) {
            cases.push_back(c.marginals);
        }
    }
    for (const std::string& path : args.marginals_paths) {
        cases.push_back(ordinal::load_marginal_pair(path));
    }
    if (cases.empty()) {
        throw ordinal::ParseError("no cases: pass --marginals or --paper-cases");
    }

    ordinal::GridConfig config;
    config.sample_sizes = args.sample_sizes;
    config.lambdas = parse_lambdas(args.lambda_texts);
    config.alpha = args.alpha;
    config.replications = args.replications;
    config.null_draws = args.null_draws;
    config.seed = args.seed;
    if (args.n1 > 0) {
        config.treated_count = args.n1;
    }
    config.engine.threads = args.threads;
    config.engine.method = parse_method(args.method);

    const auto results = ordinal::run_scenario_grid(cases, config);
    std::ostringstream csv;
    ordinal::write_power_csv(csv, results);
    write_output(args.out_path, csv.str());
    return kExitOk;
}

struct ReproduceArgs {
    std::string config_path;
    std::string out_dir;
    int replications = 10'000;
    int null_draws = 2'000;
    double alpha = 0.05;
    std::uint64_t seed = 0;
    int threads = 0;
    bool paper_fidelity = false;
};

int cmd_reproduce_paper(const ReproduceArgs& args) {
    ordinal::ReproduceOptions opts;
    opts.replications = args.replications;
    opts.null_draws = args.null_draws;
    opts.alpha = args.alpha;
    opts.seed = args.seed;
    opts.threads = args.threads;
    opts.paper_fidelity = args.paper_fidelity;
    ordinal::reproduce_paper(args.out_dir, opts);
    std::cout << "wrote case_1.csv .. case_4.csv and summary.txt to " << args.out_dir
              << "\n";
    return kExitOk;
}

struct FeasibleArgs {
    std::string config_path;
    std::string marginals_path;
    int n = 0;
    std::vector<std::string> grid_texts;
    std::string out_path;
};

int cmd_feasible_lambda(const FeasibleArgs& args) {
    const ordinal::MarginalPair mp = ordinal::load_marginal_pair(args.marginals_path);
    const std::vector<ordinal::Rational> grid = args.grid_texts.empty()
                                                    ? ordinal::default_lambda_grid()
                                                    : parse_lambdas(args.grid_texts);
    const auto feasible = ordinal::feasible_lambda_set(mp, args.n, grid);

    json doc;
    doc["marginals"] = ordinal::to_json(mp);
    doc["n"] = args.n;
    doc["grid_points"] = grid.size();
    auto& list = doc["feasible"] = json::array();
    for (const ordinal::CalibratedMatrix& cm : feasible) {
        list.push_back(ordinal::to_json(cm));
    }
    write_output(args.out_path, doc.dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Construction of ordinal potential-outcome distributions at controlled departures "
        "from the sharp null, and Monte Carlo power of U^2 randomization tests"};
    app.require_subcommand(1);

    ConstructArgs construct_args;
    CLI::App* construct = app.add_subcommand(
        "construct", "Build minimizer/maximizer/blend/calibrated matrices for one lambda");
    construct->add_option("--config", construct_args.config_path,
                          "flat key=value config file");
    auto* c_marginals = construct->add_option("--marginals", construct_args.marginals_path,
                                              "MarginalPair JSON file");
    auto* c_lambda = construct->add_option(
        "--lambda", construct_args.lambda_text,
        "sensitivity parameter (rational, e.g. 1/4 or 0.25)");
    auto* c_n = construct->add_option("--n", construct_args.n, "population size");
    auto* c_out = construct->add_option("--out", construct_args.out_path,
                                        "output JSON path (default stdout)");

    PowerArgs power_args;
    CLI::App* power = app.add_subcommand("power", "Estimate power over a scenario grid");
    power->add_option("--config", power_args.config_path, "flat key=value config file");
    auto* p_marginals = power->add_option("--marginals", power_args.marginals_paths,
                                          "MarginalPair JSON file(s), one per case");
    auto* p_paper = power->add_flag("--paper-cases", power_args.use_paper_cases,
                                    "prepend the four built-in study cases");
    auto* p_ns = power->add_option("--ns", power_args.sample_sizes, "population sizes");
    auto* p_lambdas =
        power->add_option("--lambdas", power_args.lambda_texts, "lambda grid (rationals)");
    auto* p_alpha = power->add_option("--alpha", power_args.alpha, "significance level");
    auto* p_reps =
        power->add_option("--reps", power_args.replications, "replications per scenario");
    auto* p_draws = power->add_option("--null-draws", power_args.null_draws,
                                      "null draws per p-value");
    auto* p_seed = power->add_option("--seed", power_args.seed, "root seed");
    auto* p_n1 =
        power->add_option("--n1", power_args.n1, "treated count (0 = balanced n/2)");
    auto* p_threads = power->add_option("--threads", power_args.threads,
                                        "worker thread cap (0 = hardware)");
    auto* p_method =
        power->add_option("--method", power_args.method, "p-value method: mc, exact, auto");
    auto* p_out =
        power->add_option("--out", power_args.out_path, "output CSV path (default stdout)");

    ReproduceArgs reproduce_args;
    CLI::App* reproduce = app.add_subcommand(
        "reproduce-paper", "Run the full 4-case study grid and write per-case CSVs");
    reproduce->add_option("--config", reproduce_args.config_path,
                          "flat key=value config file");
    auto* r_out = reproduce->add_option("--out", reproduce_args.out_dir, "output directory");
    auto* r_reps = reproduce->add_option("--reps", reproduce_args.replications,
                                         "replications per scenario (desk scale default)");
    auto* r_draws = reproduce->add_option("--null-draws", reproduce_args.null_draws,
                                          "null draws per p-value");
    auto* r_alpha =
        reproduce->add_option("--alpha", reproduce_args.alpha, "significance level");
    auto* r_seed = reproduce->add_option("--seed", reproduce_args.seed, "root seed");
    auto* r_threads = reproduce->add_option("--threads", reproduce_args.threads,
                                            "worker thread cap (0 = hardware)");
    auto* r_fidelity = reproduce->add_flag("--paper-fidelity", reproduce_args.paper_fidelity,
                                           "raise replications to 200000");

    FeasibleArgs feasible_args;
    CLI::App* feasible = app.add_subcommand(
        "feasible-lambda", "Calibrate a lambda grid and report the feasible set");
    feasible->add_option("--config", feasible_args.config_path,
                         "flat key=value config file");
    auto* f_marginals = feasible->add_option("--marginals", feasible_args.marginals_path,
                                             "MarginalPair JSON file");
    auto* f_n = feasible->add_option("--n", feasible_args.n, "population size");
    auto* f_grid = feasible->add_option("--grid", feasible_args.grid_texts,
                                        "lambda grid (default i/100 for i = 0..100)");
    auto* f_out = feasible->add_option("--out", feasible_args.out_path,
                                       "output JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInputError;
    }

    try {
        if (construct->parsed()) {
            apply_config(
                construct_args.config_path,
                {{"marginals", c_marginals,
                  [&](const std::string& v) { construct_args.marginals_path = v; }},
                 {"lambda", c_lambda,
                  [&](const std::string& v) { construct_args.lambda_text = v; }},
                 {"n", c_n,
                  [&](const std::string& v) {
                      construct_args.n = static_cast<int>(parse_ll(v, "n"));
                  }},
                 {"out", c_out,
                  [&](const std::string& v) { construct_args.out_path = v; }}});
            if (construct_args.marginals_path.empty()) {
                throw ordinal::ParseError("construct requires --marginals");
            }
            if (construct_args.n == 0) {
                throw ordinal::ParseError("construct requires --n");
            }
            return cmd_construct(construct_args);
        }
        if (power->parsed()) {
            apply_config(
                power_args.config_path,
                {{"marginals", p_marginals,
                  [&](const std::string& v) { power_args.marginals_paths = split_commas(v); }},
                 {"paper-cases", p_paper,
                  [&](const std::string& v) {
                      power_args.use_paper_cases = parse_bool(v, "paper-cases");
                  }},
                 {"ns", p_ns,
                  [&](const std::string& v) {
                      power_args.sample_sizes.clear();
                      for (const std::string& item : split_commas(v)) {
                          power_args.sample_sizes.push_back(
                              static_cast<int>(parse_ll(item, "ns")));
                      }
                  }},
                 {"lambdas", p_lambdas,
                  [&](const std::string& v) { power_args.lambda_texts = split_commas(v); }},
                 {"alpha", p_alpha,
                  [&](const std::string& v) { power_args.alpha = parse_d(v, "alpha"); }},
                 {"reps", p_reps,
                  [&](const std::string& v) {
                      power_args.replications = static_cast<int>(parse_ll(v, "reps"));
                  }},
                 {"null-draws", p_draws,
                  [&](const std::string& v) {
                      power_args.null_draws = static_cast<int>(parse_ll(v, "null-draws"));
                  }},
                 {"seed", p_seed,
                  [&](const std::string& v) { power_args.seed = parse_u64(v, "seed"); }},
                 {"n1", p_n1,
                  [&](const std::string& v) {
                      power_args.n1 = static_cast<int>(parse_ll(v, "n1"));
                  }},
                 {"threads", p_threads,
                  [&](const std::string& v) {
                      power_args.threads = static_cast<int>(parse_ll(v, "threads"));
                  }},
                 {"method", p_method,
                  [&](const std::string& v) { power_args.method = v; }},
                 {"out", p_out,
                  [&](const std::string& v) { power_args.out_path = v; }}});
            return cmd_power(power_args);
        }
        if (reproduce->parsed()) {
            apply_config(
                reproduce_args.config_path,
                {{"out", r_out, [&](const std::string& v) { reproduce_args.out_dir = v; }},
                 {"reps", r_reps,
                  [&](const std::string& v) {
                      reproduce_args.replications = static_cast<int>(parse_ll(v, "reps"));
                  }},
                 {"null-draws", r_draws,
                  [&](const std::string& v) {
                      reproduce_args.null_draws =
                          static_cast<int>(parse_ll(v, "null-draws"));
                  }},
                 {"alpha", r_alpha,
                  [&](const std::string& v) { reproduce_args.alpha = parse_d(v, "alpha"); }},
                 {"seed", r_seed,
                  [&](const std::string& v) { reproduce_args.seed = parse_u64(v, "seed"); }},
                 {"threads", r_threads,
                  [&](const std::string& v) {
                      reproduce_args.threads = static_cast<int>(parse_ll(v, "threads"));
                  }},
                 {"paper-fidelity", r_fidelity,
                  [&](const std::string& v) {
                      reproduce_args.paper_fidelity = parse_bool(v, "paper-fidelity");
                  }}});
            if (reproduce_args.out_dir.empty()) {
                throw ordinal::ParseError("reproduce-paper requires --out");
            }
            return cmd_reproduce_paper(reproduce_args);
        }
        if (feasible->parsed()) {
            apply_config(
                feasible_args.config_path,
                {{"marginals", f_marginals,
                  [&](const std::string& v) { feasible_args.marginals_path = v; }},
                 {"n", f_n,
                  [&](const std::string& v) {
                      feasible_args.n = static_cast<int>(parse_ll(v, "n"));
                  }},
                 {"grid", f_grid,
                  [&](const std::string& v) { feasible_args.grid_texts = split_commas(v); }},
                 {"out", f_out,
                  [&](const std::string& v) { feasible_args.out_path = v; }}});
            if (feasible_args.marginals_path.empty()) {
                throw ordinal::ParseError("feasible-lambda requires --marginals");
            }
            if (feasible_args.n == 0) {
                throw ordinal::ParseError("feasible-lambda requires --n");
            }
            return cmd_feasible_lambda(feasible_args);
        }
    } catch (const ordinal::InfeasibleScenario& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const ordinal::DominanceViolated& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const ordinal::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitOk;
}
