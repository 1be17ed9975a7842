#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "remi/complexity.hpp"
#include "remi/enumeration.hpp"
#include "remi/kb_store.hpp"

namespace remi {

struct SearchOptions {
  std::size_t threads = 1;
  std::optional<std::chrono::steady_clock::duration> timeout;
  // Skip nodes whose complexity is not below the best RE found so far. Never
  // changes the result; off reproduces the unbounded sequential traversal.
  bool bound_pruning = true;
};

struct SearchStats {
  std::size_t nodes_visited = 0;
  std::size_t re_tests = 0;
  std::size_t prunes_by_depth = 0;
  std::size_t side_prunes = 0;
  std::size_t bound_prunes = 0;
  std::size_t queue_size = 0;
  std::chrono::nanoseconds wall_time{0};

  SearchStats& operator+=(const SearchStats& other);
};

enum class SearchStatus { Found, NoRE, TimedOut };

std::string_view to_string(SearchStatus status);

struct SearchOutcome {
  SearchStatus status = SearchStatus::NoRE;
  // Set for Found; for TimedOut, the best RE seen before the deadline if any.
  std::optional<Expression> expression;
  ComplexityBits bits = ComplexityBits::infinity();
  SearchStats stats;
};

// Sequential search over conjunctions of queue candidates. Nodes are strictly
// increasing index sequences; each root candidate's subtree is explored
// depth-first with pruning by depth and side pruning. targets must be sorted,
// duplicate-free entities of the store, and the queue built from their common
// subgraph expressions.
SearchOutcome remi_search(const TripleStore& store, const CandidateQueue& queue, std::span<const TermId> targets,
                          const SearchOptions& options = {});

// The same search with options.threads workers dequeuing root candidates and
// sharing the best solution and a cancellation index.
SearchOutcome p_remi(const TripleStore& store, const CandidateQueue& queue, std::span<const TermId> targets,
                     const SearchOptions& options = {});

struct OracleResult {
  std::optional<Expression> expression;
  ComplexityBits bits = ComplexityBits::infinity();
  std::size_t nodes_enumerated = 0;
};

// Exhaustive reference: every index sequence of at most max_components
// candidates in pre-order, RE-ness by full evaluation, complexity recomputed
// from the model, first minimum kept.
OracleResult oracle_min_re(const TripleStore& store, const ProminenceModel& model, const CandidateQueue& queue,
                           std::span<const TermId> targets, std::size_t max_components);

// Sorted, duplicate-free target set; throws std::invalid_argument when empty
// or when a term is not an entity of the store.
std::vector<TermId> canonical_targets(const TripleStore& store, std::span<const TermId> targets);

struct DescribeResult {
  CandidateQueue queue;
  SearchOutcome outcome;
};

// Enumerate, rank and search in one call; uses p_remi when threads > 1.
DescribeResult find_referring_expression(const ProminenceModel& model, std::span<const TermId> targets,
                                         const EnumerationOptions& enumeration, const SearchOptions& search);

}  // namespace remi
