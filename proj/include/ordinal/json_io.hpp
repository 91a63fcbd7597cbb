#pragma once

#include <string>

#include "json.hpp"
#include "ordinal/construction.hpp"

namespace ordinal {

// JSON schema: integer numerators over one shared denominator.
//   MarginalPair: {"j": J, "den": D, "p1": [..], "p0": [..]}
//   ProbMatrix:   {"j": J, "den": D, "entries": [[..],..]}
//   CalibratedMatrix: ProbMatrix fields with den = n, plus
//     {"n": N, "lambda_num": ., "lambda_den": ., "kappa_num": ., "kappa_den": .}
// where kappa is Cohen's kappa of the calibrated matrix itself.

nlohmann::json to_json(const MarginalPair& mp);
nlohmann::json to_json(const ProbMatrix& m);
nlohmann::json to_json(const CalibratedMatrix& cm);

MarginalPair marginal_pair_from_json(const nlohmann::json& doc);
ProbMatrix prob_matrix_from_json(const nlohmann::json& doc);

// Reads and parses a MarginalPair JSON file; throws ParseError on any
// failure (missing file, bad JSON, schema violation).
MarginalPair load_marginal_pair(const std::string& path);

nlohmann::json parse_json_file(const std::string& path);

}  // namespace ordinal
