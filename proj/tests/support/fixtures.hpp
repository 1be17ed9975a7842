#pragma once

#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "remi/kb_store.hpp"

namespace remi::test {

inline std::string data_path(std::string_view name) { return std::string(REMI_TEST_DATA_DIR) + "/" + std::string(name); }

inline constexpr std::string_view kEx = "http://example.org/";

inline std::string ex(std::string_view local) { return std::string(kEx) + std::string(local); }

// Builds N-Triples text from (subject, predicate, object) local names under
// http://example.org/. Objects starting with '"' are literals, "_:" blanks.
inline std::string ntriples(const std::vector<std::tuple<std::string, std::string, std::string>>& facts) {
  auto node = [](const std::string& name) {
    if (name.starts_with("\"") || name.starts_with("_:")) return name;
    return "<" + ex(name) + ">";
  };
  std::string text;
  for (const auto& [s, p, o] : facts) text += node(s) + " <" + ex(p) + "> " + node(o) + " .\n";
  return text;
}

inline TripleStore make_store(const std::vector<std::tuple<std::string, std::string, std::string>>& facts,
                              std::size_t cache_capacity = kDefaultCacheCapacity) {
  return parse_ntriples(ntriples(facts), cache_capacity);
}

inline TripleStore geo_store() { return load_ntriples_file(data_path("geo.nt")); }

inline TermId entity(const TripleStore& store, std::string_view local) {
  auto id = store.find_entity(ex(local));
  if (!id) throw std::invalid_argument("fixture entity missing: " + std::string(local));
  return *id;
}

inline PredicateId predicate(const TripleStore& store, std::string_view local) {
  auto id = store.find_predicate(ex(local));
  if (!id) throw std::invalid_argument("fixture predicate missing: " + std::string(local));
  return *id;
}

}  // namespace remi::test
