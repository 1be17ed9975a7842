#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "remi/expression.hpp"
#include "remi/lru_cache.hpp"
#include "remi/types.hpp"

namespace remi {

// Sorted, duplicate-free set of terms bound to the root variable.
using BindingSet = std::vector<TermId>;

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& message);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct PredicateObject {
  PredicateId predicate;
  TermId object;
  friend auto operator<=>(const PredicateObject&, const PredicateObject&) = default;
};

struct SubjectObject {
  TermId subject;
  TermId object;
  friend auto operator<=>(const SubjectObject&, const SubjectObject&) = default;
};

struct ObjectCount {
  TermId object;
  std::uint32_t count;
};

inline constexpr std::size_t kDefaultCacheCapacity = 100'000;

// LRU cache of evaluation results keyed by (operation, encoded query).
class QueryCache {
 public:
  using Key = std::array<std::uint32_t, 8>;
  struct KeyHash {
    std::size_t operator()(const Key& key) const noexcept;
  };
  using BindingsPtr = std::shared_ptr<const BindingSet>;
  using AssignmentsPtr = std::shared_ptr<const std::vector<Assignment>>;

  explicit QueryCache(std::size_t capacity) : bindings_(capacity), assignments_(capacity) {}

  LruCache<Key, BindingsPtr, KeyHash>& bindings() { return bindings_; }
  LruCache<Key, AssignmentsPtr, KeyHash>& assignments() { return assignments_; }

  void set_capacity(std::size_t capacity) {
    bindings_.set_capacity(capacity);
    assignments_.set_capacity(capacity);
  }
  std::size_t capacity() const { return bindings_.capacity(); }
  std::size_t hits() const { return bindings_.hits() + assignments_.hits(); }
  std::size_t misses() const { return bindings_.misses() + assignments_.misses(); }

 private:
  LruCache<Key, BindingsPtr, KeyHash> bindings_;
  LruCache<Key, AssignmentsPtr, KeyHash> assignments_;
};

class TripleStore;

// Accumulates triples and the term / predicate dictionaries, then freezes them
// into an indexed TripleStore.
class TripleStoreBuilder {
 public:
  TermId intern_term(TermKind kind, std::string_view lexical);
  PredicateId intern_predicate(std::string_view iri);
  void add(TermId subject, PredicateId predicate, TermId object);

  TripleStore build(std::size_t cache_capacity = kDefaultCacheCapacity) &&;

 private:
  friend TripleStore materialize_inverses(const TripleStore&, double);

  std::vector<Term> terms_;
  std::array<std::unordered_map<std::string, TermId>, 3> term_dictionary_;
  std::vector<Predicate> predicates_;
  std::unordered_map<std::string, PredicateId> predicate_dictionary_;
  std::vector<Triple> triples_;
};

// Immutable, dictionary-encoded, indexed fact set. Safe for concurrent
// readers; the embedded query cache synchronizes itself.
class TripleStore {
 public:
  TripleStore();
  TripleStore(TripleStore&&) noexcept;
  TripleStore& operator=(TripleStore&&) noexcept;
  ~TripleStore();

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  std::size_t term_count() const { return terms_.size(); }
  std::size_t predicate_count() const { return predicates_.size(); }

  const Term& term(TermId id) const { return terms_.at(id); }
  const Predicate& predicate(PredicateId id) const { return predicates_.at(id); }
  std::span<const Term> terms() const { return terms_; }
  std::span<const Predicate> predicates() const { return predicates_; }
  std::span<const Triple> triples() const { return triples_; }

  std::optional<TermId> find_term(TermKind kind, std::string_view lexical) const;
  std::optional<TermId> find_entity(std::string_view iri) const {
    return find_term(TermKind::Entity, iri);
  }
  std::optional<PredicateId> find_predicate(std::string_view iri) const;

  // Index 1: subject -> (predicate, object), sorted.
  std::span<const PredicateObject> facts_of(TermId subject) const;
  // Index 2: (predicate, object) -> subjects, sorted.
  std::span<const TermId> subjects_of(PredicateId predicate, TermId object) const;
  // Index 3: predicate -> objects with their fact counts, sorted by object.
  std::span<const ObjectCount> objects_of(PredicateId predicate) const;
  // All (subject, object) pairs of a predicate, sorted.
  std::span<const SubjectObject> pairs_of(PredicateId predicate) const;
  // Predicates p with p(subject, object), sorted.
  std::span<const PredicateId> links(TermId subject, TermId object) const;

  bool contains(TermId subject, PredicateId predicate, TermId object) const;
  std::size_t fact_count(PredicateId predicate) const { return pairs_of(predicate).size(); }
  // Number of facts in which the term occurs as subject or object.
  std::uint64_t frequency(TermId term) const { return frequency_.at(term); }
  std::size_t entity_count() const { return entity_count_; }

  QueryCache& cache() const { return *cache_; }

 private:
  friend class TripleStoreBuilder;
  friend TripleStore materialize_inverses(const TripleStore&, double);

  void build_indexes();

  std::vector<Term> terms_;
  std::array<std::unordered_map<std::string, TermId>, 3> term_dictionary_;
  std::vector<Predicate> predicates_;
  std::unordered_map<std::string, PredicateId> predicate_dictionary_;
  std::vector<Triple> triples_;

  std::vector<std::size_t> subject_offsets_;
  std::vector<PredicateObject> subject_facts_;
  std::vector<std::unordered_map<TermId, std::vector<TermId>>> subjects_by_object_;
  std::vector<std::vector<ObjectCount>> object_counts_;
  std::vector<std::vector<SubjectObject>> pairs_;
  std::unordered_map<std::uint64_t, std::vector<PredicateId>> links_;
  std::vector<std::uint64_t> frequency_;
  std::size_t entity_count_ = 0;

  std::unique_ptr<QueryCache> cache_;
};

TripleStore parse_ntriples(std::istream& input, std::size_t cache_capacity = kDefaultCacheCapacity);
TripleStore parse_ntriples(std::string_view text, std::size_t cache_capacity = kDefaultCacheCapacity);
TripleStore load_ntriples_file(const std::filesystem::path& path,
                               std::size_t cache_capacity = kDefaultCacheCapacity);

// Entities ordered by descending fact frequency, ties by ascending IRI.
std::vector<TermId> entities_by_frequency(const TripleStore& store);
// The first floor(fraction * entity_count) entries of entities_by_frequency.
std::vector<TermId> top_entities(const TripleStore& store, double fraction);

// Adds p^-1(o, s) for every p(s, o) whose object o is one of the top
// `top_fraction` entities by frequency. Literal and blank objects are never
// inverted, nor are facts of already-inverse predicates.
TripleStore materialize_inverses(const TripleStore& store, double top_fraction);

// Assignments sigma with sigma(atom) in the store. Throws
// std::invalid_argument for a fully ground atom.
std::vector<Assignment> match_atom(const TripleStore& store, const Atom& atom);

BindingSet bindings_of_subgraph(const TripleStore& store, const SubgraphExpression& rho);
std::shared_ptr<const BindingSet> shared_bindings_of_subgraph(const TripleStore& store,
                                                             const SubgraphExpression& rho);
BindingSet bindings_of_expression(const TripleStore& store, const Expression& e);

// targets must be sorted and duplicate-free.
bool is_referring_expression(const TripleStore& store, const Expression& e,
                             std::span<const TermId> targets);

BindingSet intersect(std::span<const TermId> a, std::span<const TermId> b);

// Human-readable rendering, e.g. "p(x, y) ∧ q(y, <Germanic>)".
std::string to_string(const TripleStore& store, const Atom& atom);
std::string to_string(const TripleStore& store, const SubgraphExpression& rho);
std::string to_string(const TripleStore& store, const Expression& e);

}  // namespace remi
