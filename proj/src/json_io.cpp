#include "ordinal/json_io.hpp"

#include <fstream>
#include <limits>

#include "ordinal/errors.hpp"

namespace ordinal {

namespace {

long long to_int64(const BigInt& v, const char* what) {
    if (v > std::numeric_limits<long long>::max() ||
        v < std::numeric_limits<long long>::min()) {
        throw ValidationError(std::string(what) + " exceeds the JSON integer range");
    }
    return v.convert_to<long long>();
}

BigInt common_denominator(const std::vector<const Rational*>& values) {
    BigInt den = 1;
    for (const Rational* v : values) {
        den = boost::multiprecision::lcm(den, v->den());
    }
    return den;
}

long long numerator_over(const Rational& v, const BigInt& den, const char* what) {
    return to_int64(v.num() * (den / v.den()), what);
}

const nlohmann::json& field(const nlohmann::json& doc, const char* name) {
    const auto it = doc.find(name);
    if (it == doc.end()) {
        throw ParseError(std::string("missing field '") + name + "'");
    }
    return *it;
}

long long int_field(const nlohmann::json& doc, const char* name) {
    const nlohmann::json& f = field(doc, name);
    if (!f.is_number_integer()) {
        throw ParseError(std::string("field '") + name + "' must be an integer");
    }
    return f.get<long long>();
}

std::vector<long long> int_vector(const nlohmann::json& node, const char* name, size_t j) {
    if (!node.is_array() || node.size() != j) {
        throw ParseError(std::string("field '") + name + "' must be an array of length J");
    }
    std::vector<long long> out;
    out.reserve(j);
    for (const auto& v : node) {
        if (!v.is_number_integer()) {
            throw ParseError(std::string("field '") + name + "' must contain integers");
        }
        out.push_back(v.get<long long>());
    }
    return out;
}

}  // namespace

nlohmann::json to_json(const MarginalPair& mp) {
    std::vector<const Rational*> all;
    for (const Rational& v : mp.treated()) all.push_back(&v);
    for (const Rational& v : mp.control()) all.push_back(&v);
    const BigInt den = common_denominator(all);

    nlohmann::json doc;
    doc["j"] = mp.categories();
    doc["den"] = to_int64(den, "marginal denominator");
    auto& p1 = doc["p1"] = nlohmann::json::array();
    auto& p0 = doc["p0"] = nlohmann::json::array();
    for (const Rational& v : mp.treated()) p1.push_back(numerator_over(v, den, "p1 numerator"));
    for (const Rational& v : mp.control()) p0.push_back(numerator_over(v, den, "p0 numerator"));
    return doc;
}

nlohmann::json to_json(const ProbMatrix& m) {
    std::vector<const Rational*> all;
    for (const auto& row : m.rows()) {
        for (const Rational& v : row) all.push_back(&v);
    }
    const BigInt den = common_denominator(all);

    nlohmann::json doc;
    doc["j"] = m.categories();
    doc["den"] = to_int64(den, "matrix denominator");
    auto& entries = doc["entries"] = nlohmann::json::array();
    for (const auto& row : m.rows()) {
        nlohmann::json out_row = nlohmann::json::array();
        for (const Rational& v : row) {
            out_row.push_back(numerator_over(v, den, "matrix numerator"));
        }
        entries.push_back(std::move(out_row));
    }
    return doc;
}

nlohmann::json to_json(const CalibratedMatrix& cm) {
    nlohmann::json doc;
    doc["j"] = cm.matrix.categories();
    doc["den"] = cm.n;
    auto& entries = doc["entries"] = nlohmann::json::array();
    for (const auto& row : cm.matrix.rows()) {
        nlohmann::json out_row = nlohmann::json::array();
        for (const Rational& v : row) {
            out_row.push_back(numerator_over(v, BigInt(cm.n), "matrix numerator"));
        }
        entries.push_back(std::move(out_row));
    }
    doc["n"] = cm.n;
    doc["lambda_num"] = to_int64(cm.lambda.num(), "lambda numerator");
    doc["lambda_den"] = to_int64(cm.lambda.den(), "lambda denominator");
    const Rational kappa = cohens_kappa(cm.matrix);
    doc["kappa_num"] = to_int64(kappa.num(), "kappa numerator");
    doc["kappa_den"] = to_int64(kappa.den(), "kappa denominator");
    return doc;
}

MarginalPair marginal_pair_from_json(const nlohmann::json& doc) {
    const long long j = int_field(doc, "j");
    const long long den = int_field(doc, "den");
    if (j < 2 || j > 1000) {
        throw ParseError("category count j must be in [2, 1000]");
    }
    const auto p1 = int_vector(field(doc, "p1"), "p1", static_cast<size_t>(j));
    const auto p0 = int_vector(field(doc, "p0"), "p0", static_cast<size_t>(j));
    try {
        return MarginalPair::from_counts(static_cast<int>(j), den, p1, p0);
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

ProbMatrix prob_matrix_from_json(const nlohmann::json& doc) {
    const long long j = int_field(doc, "j");
    const long long den = int_field(doc, "den");
    if (j < 2 || j > 1000) {
        throw ParseError("category count j must be in [2, 1000]");
    }
    if (den <= 0) {
        throw ParseError("denominator must be positive");
    }
    const nlohmann::json& entries = field(doc, "entries");
    if (!entries.is_array() || entries.size() != static_cast<size_t>(j)) {
        throw ParseError("'entries' must be a JxJ array");
    }
    std::vector<std::vector<Rational>> rows;
    rows.reserve(static_cast<size_t>(j));
    for (const auto& row : entries) {
        const auto nums = int_vector(row, "entries", static_cast<size_t>(j));
        std::vector<Rational> out_row;
        out_row.reserve(nums.size());
        for (long long v : nums) {
            out_row.emplace_back(BigInt(v), BigInt(den));
        }
        rows.push_back(std::move(out_row));
    }
    try {
        return ProbMatrix::from_rows(std::move(rows));
    } catch (const ValidationError& e) {
        throw ParseError(e.what());
    }
}

nlohmann::json parse_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open file " + path);
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("invalid JSON in " + path + ": " + e.what());
    }
}

MarginalPair load_marginal_pair(const std::string& path) {
    return marginal_pair_from_json(parse_json_file(path));
}

}  // namespace ordinal
