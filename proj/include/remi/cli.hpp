#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "remi/enumeration.hpp"
#include "remi/prominence.hpp"
#include "remi/search.hpp"

namespace remi::cli {

using nlohmann::json;

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kResolutionError = 2,
  kTimeoutWithoutResult = 3,
};

struct RunConfig {
  std::string kb_path;
  std::optional<std::string> pagerank_path;
  Metric metric = Metric::Frequency;
  RankMode mode = RankMode::Exact;
  Language language = Language::Extended;
  std::size_t threads = 1;
  std::optional<double> timeout_seconds;
  double inverse_top_fraction = 0.01;
  double prominent_cutoff = 0.05;
  std::size_t cache_capacity = kDefaultCacheCapacity;
  std::vector<std::string> exclude_predicates;
  bool no_inverse = false;
  std::optional<std::size_t> top_k;
  bool print_stats = false;
  // IRIs, already canonicalized (see parse_targets).
  std::vector<std::string> targets;
};

struct CommandResult {
  int exit_code = kSuccess;
  json document;
};

// "a,b,<c>" or "@path" (one IRI per line, '#' comments). Angle brackets and
// surrounding whitespace are stripped; duplicates removed; order kept.
std::vector<std::string> parse_targets(const std::string& arg);

CommandResult cmd_describe(const RunConfig& config);
CommandResult cmd_summarize(const RunConfig& config);

json subgraph_to_json(const TripleStore& store, const SubgraphExpression& rho);
json expression_to_json(const TripleStore& store, const Expression& e);
// Inverse of subgraph_to_json / expression_to_json against the same store.
// Throws std::invalid_argument on unknown names or malformed documents.
SubgraphExpression subgraph_from_json(const TripleStore& store, const json& document);
Expression expression_from_json(const TripleStore& store, const json& document);

// Full command line: parses flags, runs the command, writes the JSON document
// to out and diagnostics to err, returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace remi::cli
