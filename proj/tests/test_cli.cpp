#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ordinal/json_io.hpp"

#ifndef ORDINAL_CLI_PATH
#error "ORDINAL_CLI_PATH must be defined by the build"
#endif

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "ordinal_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    const fs::path out_file = work_dir() / "stdout.txt";
    const fs::path err_file = work_dir() / "stderr.txt";
    const std::string cmd = std::string(ORDINAL_CLI_PATH) + " " + args + " > " +
                            out_file.string() + " 2> " + err_file.string();
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = work_dir() / name;
    std::ofstream out(p, std::ios::binary);
    out << content;
    return p;
}

const std::string kCase1Json = R"({"j": 2, "den": 10, "p1": [3, 7], "p0": [6, 4]})";
const std::string kSharpJson = R"({"j": 2, "den": 10, "p1": [6, 4], "p0": [6, 4]})";
const std::string kNonDominantJson = R"({"j": 3, "den": 6, "p1": [3, 2, 1], "p0": [2, 2, 2]})";
const std::string kLopsidedJson = R"({"j": 3, "den": 6, "p1": [1, 2, 3], "p0": [3, 2, 1]})";

}  // namespace

TEST_CASE("cli requires a subcommand") {
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("frobnicate").exit_code == 2);
}

TEST_CASE("construct emits the maximizer, bound, and calibrated matrix") {
    const fs::path marginals = write_file("case1.json", kCase1Json);
    const fs::path out = work_dir() / "construct.json";
    const RunResult r = run_cli("construct --marginals " + marginals.string() +
                                " --lambda 0 --n 120 --out " + out.string());
    REQUIRE(r.exit_code == 0);

    const json doc = json::parse(slurp(out));
    CHECK(doc["kappa_upper_num"] == 4);
    CHECK(doc["kappa_upper_den"] == 9);
    CHECK(doc["kappa_blend_num"] == 4);
    CHECK(doc["kappa_blend_den"] == 9);
    CHECK(std::abs(doc["tau_hd"].get<double>() - 0.216) < 5e-4);

    const auto mp = ordinal::MarginalPair::from_counts(2, 10, {3, 7}, {6, 4});
    CHECK(ordinal::prob_matrix_from_json(doc["maximizer"]) ==
          ordinal::maximizer_general(mp));
    CHECK(ordinal::prob_matrix_from_json(doc["minimizer"]) ==
          ordinal::independent_minimizer(mp));
    CHECK(doc["calibrated"]["n"] == 120);
    CHECK(doc["calibrated"]["den"] == 120);
}

TEST_CASE("construct rejects non-dominant marginals with exit 2 and the tail index") {
    const fs::path marginals = write_file("p1.json", kNonDominantJson);
    const RunResult r =
        run_cli("construct --marginals " + marginals.string() + " --lambda 0 --n 120");
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("j = 1") != std::string::npos);
}

TEST_CASE("construct reports infeasible lambda with exit 3") {
    const fs::path marginals = write_file("lopsided.json", kLopsidedJson);
    const RunResult r =
        run_cli("construct --marginals " + marginals.string() + " --lambda 1/2 --n 6");
    CHECK(r.exit_code == 3);
    CHECK(r.err.find("infeasible") != std::string::npos);
}

TEST_CASE("construct on identical marginals gives the diagonal sharp-null matrix") {
    const fs::path marginals = write_file("sharp.json", kSharpJson);
    const fs::path out = work_dir() / "sharp_construct.json";
    const RunResult r = run_cli("construct --marginals " + marginals.string() +
                                " --lambda 0 --n 10 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc["kappa_blend_num"] == 1);
    CHECK(doc["kappa_blend_den"] == 1);
    CHECK(doc["tau_hd"].get<double>() == 0.0);
    CHECK(doc["maximizer"]["den"] == 5);
    CHECK(doc["maximizer"]["entries"] ==
          json::array({json::array({3, 0}), json::array({0, 2})}));
}

TEST_CASE("construct rejects missing and malformed input with exit 2") {
    CHECK(run_cli("construct --marginals /nonexistent.json --lambda 0 --n 10").exit_code ==
          2);
    const fs::path bad = write_file("bad.json", "{oops");
    CHECK(run_cli("construct --marginals " + bad.string() + " --lambda 0 --n 10")
              .exit_code == 2);
    const fs::path marginals = write_file("case1b.json", kCase1Json);
    CHECK(run_cli("construct --marginals " + marginals.string() + " --lambda x --n 10")
              .exit_code == 2);
}

TEST_CASE("power runs are deterministic and honor flag overrides") {
    const fs::path marginals = write_file("sharp2.json", kSharpJson);
    const fs::path out_a = work_dir() / "power_a.csv";
    const fs::path out_b = work_dir() / "power_b.csv";
    const std::string base = "power --marginals " + marginals.string() +
                             " --ns 10 --lambdas 0 --reps 200 --null-draws 80 --seed 5";
    REQUIRE(run_cli(base + " --out " + out_a.string()).exit_code == 0);
    REQUIRE(run_cli(base + " --threads 2 --out " + out_b.string()).exit_code == 0);
    CHECK(slurp(out_a) == slurp(out_b));

    const std::string csv = slurp(out_a);
    CHECK(csv.find("case_id,j,n,n1,lambda,kappa") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);  // header + one row
    CHECK(csv.find(",200,80,") != std::string::npos);
    CHECK(csv.find(",ok") != std::string::npos);
}

TEST_CASE("power reads flat key-value config files, flags take precedence") {
    const fs::path marginals = write_file("sharp3.json", kSharpJson);
    const fs::path config = write_file("power.cfg",
                                       "marginals=" + marginals.string() +
                                           "\n"
                                           "ns=10\n"
                                           "lambdas=0\n"
                                           "reps=100\n"
                                           "null-draws=40\n"
                                           "seed=9\n");
    const fs::path out = work_dir() / "power_cfg.csv";
    const RunResult r = run_cli("power --config " + config.string() + " --reps 150 --out " +
                                out.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find(",150,40,") != std::string::npos);  // flag reps, config null-draws

    CHECK(run_cli("power --config /nonexistent.cfg").exit_code == 2);
}

TEST_CASE("power without cases is a config error") {
    CHECK(run_cli("power --ns 10").exit_code == 2);
}

TEST_CASE("power skips infeasible lambdas without failing") {
    const fs::path marginals = write_file("lopsided2.json", kLopsidedJson);
    const fs::path out = work_dir() / "power_skip.csv";
    const RunResult r = run_cli("power --marginals " + marginals.string() +
                                " --ns 6 --lambdas 0 --lambdas 1/2 --reps 40" +
                                " --null-draws 30 --seed 2 --out " + out.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out);
    CHECK(csv.find(",ok") != std::string::npos);
    CHECK(csv.find(",skipped_infeasible") != std::string::npos);
}

TEST_CASE("feasible-lambda reports the feasible subset of the grid") {
    const fs::path marginals = write_file("lopsided3.json", kLopsidedJson);
    const fs::path out = work_dir() / "feasible.json";
    const RunResult r = run_cli("feasible-lambda --marginals " + marginals.string() +
                                " --n 6 --grid 0 --grid 1/2 --grid 1 --out " +
                                out.string());
    REQUIRE(r.exit_code == 0);
    const json doc = json::parse(slurp(out));
    CHECK(doc["grid_points"] == 3);
    REQUIRE(doc["feasible"].size() == 2);
    CHECK(doc["feasible"][0]["lambda_num"] == 0);
    CHECK(doc["feasible"][0]["lambda_den"] == 1);
    CHECK(doc["feasible"][1]["lambda_num"] == 1);
    CHECK(doc["feasible"][1]["lambda_den"] == 1);
}

TEST_CASE("reproduce-paper smoke run at tiny scale") {
    const fs::path out_dir = work_dir() / "repro";
    const RunResult r = run_cli("reproduce-paper --out " + out_dir.string() +
                                " --reps 40 --null-draws 30 --seed 3 --threads 2");
    REQUIRE(r.exit_code == 0);
    for (const char* name :
         {"case_1.csv", "case_2.csv", "case_3.csv", "case_4.csv", "summary.txt"}) {
        CHECK(fs::exists(out_dir / name));
    }
    const std::string summary = slurp(out_dir / "summary.txt");
    CHECK(summary.find("tau_hd_values: PASS") != std::string::npos);
}
