#ifndef MRPLAN_JSON_IO_HPP
#define MRPLAN_JSON_IO_HPP

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mrplan/model.hpp"
#include "mrplan/simulator.hpp"

namespace mrplan {

inline constexpr const char* kToolVersion = "0.1.0";

using json = nlohmann::ordered_json;

// Raised on malformed JSON; message carries line and column.
struct JsonSyntaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProblemParse {
  Problem problem;
  std::vector<Diagnostic> diagnostics;  // schema + validation, with JSON paths
};

// strict: unknown fields are errors; otherwise warnings.
ProblemParse parse_problem(const std::string& text, bool strict = true);

json emit_solution(const Solution& solution, const std::string& currency);

// Inverse of emit_solution, for round-trip checks and downstream tooling.
Solution parse_solution(const std::string& text);

// Standalone network description for the simulate/validate commands.
std::pair<NetworkSpec, SimParams> parse_network(const json& j,
                                                const std::string& path = "");

std::pair<NetworkSpec, SimParams> parse_network_text(const std::string& text);

json emit_estimate(const SimEstimate& est, std::uint64_t seed);

}  // namespace mrplan

#endif
