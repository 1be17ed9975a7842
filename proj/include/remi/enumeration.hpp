#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "remi/complexity.hpp"
#include "remi/expression.hpp"
#include "remi/kb_store.hpp"
#include "remi/prominence.hpp"

namespace remi {

enum class Language : std::uint8_t {
  Standard,  // single atoms with bound objects only
  Extended,  // all five subgraph shapes
};

struct EnumerationOptions {
  Language language = Language::Extended;
  // Atoms whose object is among this top fraction of entities by fact
  // frequency are not extended into multi-atom expressions. 0 disables.
  double prominent_cutoff = 0.05;
  bool include_inverses = true;
  std::vector<PredicateId> excluded_predicates;
};

// Per-store enumeration state: the prominent-entity set and predicate filter
// are computed once and reused for every target.
class SubgraphEnumerator {
 public:
  SubgraphEnumerator(const TripleStore& store, EnumerationOptions options);

  // Sorted, duplicate-free canonical expressions having t among their
  // bindings. Throws std::invalid_argument if t is not an entity of the store.
  std::vector<SubgraphExpression> expressions_of(TermId t) const;

  bool is_prominent(TermId term) const { return prominent_.contains(term); }
  bool allows(PredicateId p) const { return p < allowed_.size() && allowed_[p]; }
  const EnumerationOptions& options() const { return options_; }

 private:
  const TripleStore* store_;
  EnumerationOptions options_;
  std::unordered_set<TermId> prominent_;
  std::vector<bool> allowed_;
};

std::vector<SubgraphExpression> subgraph_expressions_of_entity(const TripleStore& store, TermId t,
                                                               const EnumerationOptions& options = {});

// Intersection over the targets, enumerated concurrently when threads > 1.
std::vector<SubgraphExpression> common_subgraphs(const TripleStore& store, std::span<const TermId> targets,
                                                 const EnumerationOptions& options = {},
                                                 std::size_t threads = 1);

struct QueueEntry {
  SubgraphExpression expression;
  ComplexityBits bits;
  std::string text;  // canonical rendering, the tie-break key
};

// Candidates in strictly increasing (bits, text) order.
struct CandidateQueue {
  std::vector<QueueEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  const QueueEntry& operator[](std::size_t i) const { return entries[i]; }
};

CandidateQueue build_queue(const ProminenceModel& model, std::span<const SubgraphExpression> candidates,
                           std::size_t threads = 1);

std::vector<SubgraphExpression> top_k_subgraphs(const CandidateQueue& queue, std::size_t k);

}  // namespace remi
