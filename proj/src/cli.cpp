#include "remi/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"

namespace remi::cli {

namespace {

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ResolutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(std::string s) {
  auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string strip_brackets(std::string iri) {
  iri = trim(std::move(iri));
  if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') iri = iri.substr(1, iri.size() - 2);
  return iri;
}

std::string_view to_string(Metric metric) { return metric == Metric::Frequency ? "fr" : "pr"; }
std::string_view to_string(RankMode mode) { return mode == RankMode::Exact ? "exact" : "fitted"; }
std::string_view to_string(Language language) { return language == Language::Standard ? "standard" : "extended"; }

json config_to_json(const RunConfig& config) {
  json j;
  j["kb"] = config.kb_path;
  j["pagerank"] = config.pagerank_path ? json(*config.pagerank_path) : json(nullptr);
  j["metric"] = to_string(config.metric);
  j["mode"] = to_string(config.mode);
  j["language"] = to_string(config.language);
  j["threads"] = config.threads;
  j["timeout_seconds"] = config.timeout_seconds ? json(*config.timeout_seconds) : json(nullptr);
  j["inverse_top_fraction"] = config.inverse_top_fraction;
  j["prominent_cutoff"] = config.prominent_cutoff;
  j["cache_capacity"] = config.cache_capacity;
  j["exclude_predicates"] = config.exclude_predicates;
  j["no_inverse"] = config.no_inverse;
  j["top_k"] = config.top_k ? json(*config.top_k) : json(nullptr);
  return j;
}

json stats_to_json(const SearchStats& stats) {
  return json{
      {"nodes_visited", stats.nodes_visited},
      {"re_tests", stats.re_tests},
      {"prunes_by_depth", stats.prunes_by_depth},
      {"side_prunes", stats.side_prunes},
      {"bound_prunes", stats.bound_prunes},
      {"queue_size", stats.queue_size},
      {"wall_time_ms", std::chrono::duration<double, std::milli>(stats.wall_time).count()},
  };
}

json error_document(std::string_view kind, const std::string& message) {
  return json{{"status", "error"}, {"error", {{"kind", kind}, {"message", message}}}};
}

void validate(const RunConfig& config) {
  auto fraction_ok = [](double f) { return std::isfinite(f) && f >= 0.0 && f <= 1.0; };
  if (config.kb_path.empty()) throw InputError("--kb is required");
  if (!fraction_ok(config.inverse_top_fraction)) throw InputError("--inverse-top must be in [0, 1]");
  if (!fraction_ok(config.prominent_cutoff)) throw InputError("--prominent-cutoff must be in [0, 1]");
  if (config.threads < 1) throw InputError("--threads must be at least 1");
  if (config.timeout_seconds && !(*config.timeout_seconds >= 0.0)) throw InputError("--timeout must be >= 0");
  if (config.metric == Metric::PageRank && !config.pagerank_path) throw InputError("--metric pr needs --pagerank");
  if (config.targets.empty()) throw InputError("no targets given");
}

// Store, model and options shared by both commands. The model keeps a
// pointer to the store, so both live behind stable heap addresses.
struct Session {
  std::unique_ptr<TripleStore> store;
  std::unique_ptr<ProminenceModel> model;
  EnumerationOptions enumeration;
  std::vector<TermId> targets;
};

Session open_session(const RunConfig& config, std::ostream& diagnostics) {
  validate(config);
  Session session;
  try {
    auto raw = load_ntriples_file(config.kb_path, config.cache_capacity);
    session.store = std::make_unique<TripleStore>(materialize_inverses(raw, config.inverse_top_fraction));
  } catch (const ParseError& e) {
    throw InputError(config.kb_path + ": " + e.what());
  } catch (const std::runtime_error& e) {
    throw InputError(e.what());
  }
  session.model = std::make_unique<ProminenceModel>(*session.store, config.mode);
  if (config.pagerank_path) {
    std::ifstream rows(*config.pagerank_path);
    if (!rows) throw InputError("cannot open " + *config.pagerank_path);
    try {
      session.model->load_pagerank(rows);
    } catch (const ParseError& e) {
      throw InputError(*config.pagerank_path + ": " + e.what());
    }
  }
  session.model->set_metric(config.metric);

  session.enumeration.language = config.language;
  session.enumeration.prominent_cutoff = config.prominent_cutoff;
  session.enumeration.include_inverses = !config.no_inverse;
  for (const auto& iri : config.exclude_predicates) {
    auto name = strip_brackets(iri);
    if (auto p = session.store->find_predicate(name)) {
      session.enumeration.excluded_predicates.push_back(*p);
    } else {
      diagnostics << "warning: excluded predicate not in the KB: " << name << "\n";
    }
  }

  std::vector<TermId> ids;
  for (const auto& iri : config.targets) {
    auto id = session.store->find_entity(strip_brackets(iri));
    if (!id) throw ResolutionError("unknown target entity: " + iri);
    ids.push_back(*id);
  }
  session.targets = canonical_targets(*session.store, ids);
  return session;
}

template <typename Command>
CommandResult guarded(Command&& command) {
  try {
    return command();
  } catch (const InputError& e) {
    return {kInputError, error_document("input", e.what())};
  } catch (const ResolutionError& e) {
    return {kResolutionError, error_document("resolution", e.what())};
  }
}

json argument_to_json(const TripleStore& store, const Argument& arg) {
  if (const auto* var = std::get_if<Variable>(&arg)) {
    return *var == Variable::X ? json{{"role", "root"}, {"value", "x"}} : json{{"role", "variable"}, {"value", "y"}};
  }
  const auto& term = store.term(std::get<TermId>(arg));
  return json{{"role", std::string(to_string(term.kind))}, {"value", term.lexical}};
}

Shape shape_from_string(const std::string& name) {
  for (auto shape : {Shape::OneAtom, Shape::Path, Shape::PathStar, Shape::Closed2, Shape::Closed3}) {
    if (to_string(shape) == name) return shape;
  }
  throw std::invalid_argument("unknown shape: " + name);
}

}  // namespace

std::vector<std::string> parse_targets(const std::string& arg) {
  std::vector<std::string> raw;
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream file(arg.substr(1));
    if (!file) throw InputError("cannot open target file " + arg.substr(1));
    std::string line;
    while (std::getline(file, line)) {
      line = trim(line);
      if (!line.empty() && line.front() != '#') raw.push_back(line);
    }
  } else {
    std::stringstream list(arg);
    std::string item;
    while (std::getline(list, item, ',')) raw.push_back(item);
  }
  std::vector<std::string> out;
  for (auto& item : raw) {
    auto iri = strip_brackets(item);
    if (iri.empty()) continue;
    if (std::find(out.begin(), out.end(), iri) == out.end()) out.push_back(iri);
  }
  return out;
}

json subgraph_to_json(const TripleStore& store, const SubgraphExpression& rho) {
  json atoms = json::array();
  for (const auto& atom : rho.atoms()) {
    const auto& predicate = store.predicate(atom.predicate);
    atoms.push_back(json{{"predicate", predicate.lexical},
                         {"inverse", predicate.is_inverse},
                         {"subject", argument_to_json(store, atom.subject)},
                         {"object", argument_to_json(store, atom.object)}});
  }
  return json{{"shape", std::string(to_string(rho.shape))}, {"atoms", atoms}, {"text", to_string(store, rho)}};
}

json expression_to_json(const TripleStore& store, const Expression& e) {
  json out = json::array();
  for (const auto& rho : e.components) out.push_back(subgraph_to_json(store, rho));
  return out;
}

SubgraphExpression subgraph_from_json(const TripleStore& store, const json& document) {
  const auto shape = shape_from_string(document.at("shape").get<std::string>());
  const auto& atoms = document.at("atoms");
  std::vector<PredicateId> predicates;
  std::vector<TermId> objects;
  for (const auto& atom : atoms) {
    auto name = atom.at("predicate").get<std::string>();
    auto p = store.find_predicate(name);
    if (!p) throw std::invalid_argument("unknown predicate: " + name);
    predicates.push_back(*p);
    const auto& object = atom.at("object");
    const auto role = object.at("role").get<std::string>();
    const auto value = object.at("value").get<std::string>();
    if (role == "root" || role == "variable") {
      objects.push_back(kNoId);
      continue;
    }
    TermKind kind = role == "entity" ? TermKind::Entity : role == "literal" ? TermKind::Literal : TermKind::Blank;
    auto id = store.find_term(kind, value);
    if (!id) throw std::invalid_argument("unknown " + role + ": " + value);
    objects.push_back(*id);
  }
  auto expect = [&](std::size_t n) {
    if (predicates.size() != n) throw std::invalid_argument("wrong atom count for shape");
  };
  switch (shape) {
    case Shape::OneAtom:
      expect(1);
      return SubgraphExpression::one_atom(predicates[0], objects[0]);
    case Shape::Path:
      expect(2);
      return SubgraphExpression::path(predicates[0], predicates[1], objects[1]);
    case Shape::PathStar:
      expect(3);
      return SubgraphExpression::path_star(predicates[0], predicates[1], objects[1], predicates[2], objects[2]);
    case Shape::Closed2:
      expect(2);
      return SubgraphExpression::closed(predicates[0], predicates[1]);
    case Shape::Closed3:
      expect(3);
      return SubgraphExpression::closed(predicates[0], predicates[1], predicates[2]);
  }
  throw std::invalid_argument("unknown shape");
}

Expression expression_from_json(const TripleStore& store, const json& document) {
  if (!document.is_array()) throw std::invalid_argument("expression must be an array");
  Expression e;
  for (const auto& rho : document) e.components.push_back(subgraph_from_json(store, rho));
  return e;
}

CommandResult cmd_describe(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    std::ostringstream diagnostics;
    auto session = open_session(config, diagnostics);
    const auto& store = *session.store;

    SearchOptions search;
    search.threads = config.threads;
    if (config.timeout_seconds) {
      search.timeout = std::chrono::duration_cast<std::chrono::steady_clock::duration>(
          std::chrono::duration<double>(*config.timeout_seconds));
    }
    auto result = find_referring_expression(*session.model, session.targets, session.enumeration, search);
    const auto& outcome = result.outcome;

    json doc;
    doc["status"] = std::string(to_string(outcome.status));
    json targets = json::array();
    for (TermId t : session.targets) targets.push_back(store.term(t).lexical);
    doc["targets"] = targets;
    if (outcome.expression) {
      doc["expression"] = expression_to_json(store, *outcome.expression);
      doc["complexity_bits"] = outcome.bits.value();
    } else {
      doc["expression"] = nullptr;
      doc["complexity_bits"] = nullptr;
    }
    doc["stats"] = stats_to_json(outcome.stats);
    doc["config"] = config_to_json(config);
    if (!diagnostics.str().empty()) doc["warnings"] = diagnostics.str();

    int code = kSuccess;
    if (outcome.status == SearchStatus::TimedOut && !outcome.expression) code = kTimeoutWithoutResult;
    return {code, doc};
  });
}

CommandResult cmd_summarize(const RunConfig& config) {
  return guarded([&]() -> CommandResult {
    if (config.targets.size() != 1) throw InputError("--summarize takes exactly one target");
    std::ostringstream diagnostics;
    auto session = open_session(config, diagnostics);
    const auto& store = *session.store;
    const auto k = config.top_k.value_or(0);

    auto candidates = common_subgraphs(store, session.targets, session.enumeration, config.threads);
    auto queue = build_queue(*session.model, candidates, config.threads);
    json list = json::array();
    for (std::size_t i = 0; i < std::min(k, queue.size()); ++i) {
      auto entry = subgraph_to_json(store, queue[i].expression);
      entry["bits"] = queue[i].bits.value();
      list.push_back(std::move(entry));
    }
    json doc;
    doc["status"] = "ok";
    doc["target"] = store.term(session.targets.front()).lexical;
    doc["k"] = k;
    doc["available"] = queue.size();
    doc["subgraphs"] = list;
    doc["config"] = config_to_json(config);
    if (!diagnostics.str().empty()) doc["warnings"] = diagnostics.str();
    return {kSuccess, doc};
  });
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mine minimal-complexity referring expressions from an N-Triples knowledge base"};
  RunConfig config;
  std::string targets;
  std::string metric = "fr";
  std::string mode = "exact";
  std::string language = "extended";
  std::optional<std::size_t> summarize;

  app.add_option("--kb", config.kb_path, "N-Triples file")->required();
  app.add_option("--targets", targets, "comma-separated IRIs or @file")->required();
  app.add_option("--metric", metric, "prominence metric")->check(CLI::IsMember({"fr", "pr"}));
  app.add_option("--pagerank", config.pagerank_path, "TSV of <iri>\\t<score>");
  app.add_option("--mode", mode, "entity rank estimation")->check(CLI::IsMember({"exact", "fitted"}));
  app.add_option("--language", language, "expression language")->check(CLI::IsMember({"standard", "extended"}));
  app.add_option("--threads", config.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--timeout", config.timeout_seconds, "search budget in seconds")->check(CLI::NonNegativeNumber);
  app.add_option("--inverse-top", config.inverse_top_fraction, "fraction of top entities whose facts get inverses")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--prominent-cutoff", config.prominent_cutoff, "fraction of top entities not extended")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--cache", config.cache_capacity, "query cache capacity (0 disables)");
  app.add_option("--exclude-predicate", config.exclude_predicates, "predicate IRI to ignore (repeatable)");
  app.add_flag("--no-inverse", config.no_inverse, "ignore inverse predicates");
  app.add_option("--summarize", summarize, "list the K least complex subgraph expressions of the target");
  app.add_flag("--stats", config.print_stats, "print search statistics to stderr");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    out << error_document("input", e.what()).dump(2) << "\n";
    return kInputError;
  }

  config.metric = metric == "pr" ? Metric::PageRank : Metric::Frequency;
  config.mode = mode == "fitted" ? RankMode::Fitted : RankMode::Exact;
  config.language = language == "standard" ? Language::Standard : Language::Extended;
  config.top_k = summarize;

  CommandResult result;
  try {
    config.targets = parse_targets(targets);
    result = summarize ? cmd_summarize(config) : cmd_describe(config);
  } catch (const InputError& e) {
    result = {kInputError, error_document("input", e.what())};
  } catch (const std::exception& e) {
    result = {kInputError, error_document("internal", e.what())};
  }

  out << result.document.dump(2) << "\n";
  if (result.document.contains("warnings")) err << result.document["warnings"].get<std::string>();
  if (result.document.value("status", "") == "error") {
    err << "error: " << result.document["error"]["message"].get<std::string>() << "\n";
  }
  if (config.print_stats && result.document.contains("stats")) {
    const auto& s = result.document["stats"];
    err << "queue_size=" << s["queue_size"] << " nodes_visited=" << s["nodes_visited"]
        << " re_tests=" << s["re_tests"] << " prunes_by_depth=" << s["prunes_by_depth"]
        << " side_prunes=" << s["side_prunes"] << " bound_prunes=" << s["bound_prunes"]
        << " wall_time_ms=" << s["wall_time_ms"] << "\n";
  }
  return result.exit_code;
}

}  // namespace remi::cli
