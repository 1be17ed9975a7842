#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "remi/kb_store.hpp"

namespace remi {

enum class Metric : std::uint8_t { Frequency, PageRank };
enum class RankMode : std::uint8_t { Exact, Fitted };

// Thrown when a term or predicate is asked for its rank under a context in
// which it is not a candidate binding.
class NotACandidate : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The ranking a chain-rule term is evaluated against. The predicates array
// holds the context's pattern prefix:
//   GlobalPredicate                  all predicates
//   ObjectOfPredicate  {p}           objects I of p(x, I)
//   JoinPredicate      {p0}          predicates p1 of p0(x, y) ∧ p1(y, z)
//   ObjectOfJoin       {p0, p1}      z in p0(x, y) ∧ p1(y, z)
//   StarPredicate      {p0, p1}      p2 in p0(x, y) ∧ p1(y, z) ∧ p2(y, w), (p2, w) != (p1, z)
//   ObjectOfStar       {p0, p1, p2}  w in the same pattern
//   ClosingPredicate   {p0[, p1]}    q in p0(x, y) [∧ p1(x, y)] ∧ q(x, y), q not in the prefix
struct RankContext {
  enum class Kind : std::uint8_t {
    GlobalPredicate,
    ObjectOfPredicate,
    JoinPredicate,
    ObjectOfJoin,
    StarPredicate,
    ObjectOfStar,
    ClosingPredicate,
  };

  Kind kind = Kind::GlobalPredicate;
  std::array<PredicateId, 3> predicates{kNoId, kNoId, kNoId};

  static RankContext global() { return {}; }
  static RankContext object_of(PredicateId p) { return {Kind::ObjectOfPredicate, {p, kNoId, kNoId}}; }
  static RankContext join(PredicateId p0) { return {Kind::JoinPredicate, {p0, kNoId, kNoId}}; }
  static RankContext object_of_join(PredicateId p0, PredicateId p1) {
    return {Kind::ObjectOfJoin, {p0, p1, kNoId}};
  }
  static RankContext star(PredicateId p0, PredicateId p1) { return {Kind::StarPredicate, {p0, p1, kNoId}}; }
  static RankContext object_of_star(PredicateId p0, PredicateId p1, PredicateId p2) {
    return {Kind::ObjectOfStar, {p0, p1, p2}};
  }
  static RankContext closing(PredicateId p0, PredicateId p1 = kNoId) {
    return {Kind::ClosingPredicate, {p0, p1, kNoId}};
  }

  bool ranks_entities() const {
    return kind == Kind::ObjectOfPredicate || kind == Kind::ObjectOfJoin || kind == Kind::ObjectOfStar;
  }

  friend bool operator==(const RankContext&, const RankContext&) = default;
};

struct RankContextHash {
  std::size_t operator()(const RankContext& ctx) const noexcept;
};

// log2(rank) ≈ -alpha * log2(frequency) + beta, fitted by least squares.
struct PowerLawFit {
  double alpha = 0.0;
  double beta = 0.0;
  double r_squared = 0.0;
  std::size_t sample_size = 0;

  double estimate_bits(double frequency) const;
};

struct RankedFrequency {
  std::uint64_t rank;
  std::uint64_t frequency;
};

// Returns std::nullopt (a degenerate fit) for fewer than two points or when
// all frequencies are equal.
std::optional<PowerLawFit> fit_rank_frequency(std::span<const RankedFrequency> points);

// Fits the objects of p, ranked by conditional frequency with the
// deterministic frequency tie-break. Blank objects are ignored.
std::optional<PowerLawFit> fit_power_law(const TripleStore& store, PredicateId p);

// A materialized conditional ranking: candidates in rank order and the 1-based
// rank of each.
struct Ranking {
  std::vector<std::uint32_t> order;
  std::unordered_map<std::uint32_t, std::uint64_t> rank_of;
  std::unordered_map<std::uint32_t, std::uint64_t> count_of;
};

// Prominence rankings over a frozen store. The store must outlive the model.
// Conditional rankings are computed on demand and memoized; the memo is
// internally synchronized, so a built model can be shared across threads.
class ProminenceModel {
 public:
  explicit ProminenceModel(const TripleStore& store, RankMode mode = RankMode::Exact);
  ProminenceModel(ProminenceModel&&) noexcept;
  ProminenceModel& operator=(ProminenceModel&&) = delete;
  ~ProminenceModel();

  const TripleStore& store() const { return *store_; }
  Metric metric() const { return metric_; }
  RankMode mode() const { return mode_; }
  // Switching metric or mode clears the memoized rankings.
  void set_metric(Metric metric);
  void set_mode(RankMode mode);

  // Reads "<iri>\t<score>" rows. Throws ParseError carrying the row number.
  void load_pagerank(std::istream& rows);
  bool has_pagerank() const { return pagerank_loaded_; }
  std::optional<double> pagerank(TermId term) const;
  std::optional<double> pagerank(const std::string& iri) const;

  // Fact frequency of the term (occurrences as subject or object).
  std::uint64_t entity_score(TermId term) const { return store_->frequency(term); }
  std::uint32_t predicate_rank(PredicateId p) const { return predicate_rank_.at(p); }
  // 1-based rank of an entity in the global ranking of the active metric.
  std::optional<std::uint64_t> global_entity_rank(TermId term) const;

  std::uint64_t conditional_entity_rank(TermId term, const RankContext& ctx) const;
  std::uint64_t conditional_predicate_rank(PredicateId p, const RankContext& ctx) const;

  // log2 of the conditional entity rank, or the fitted estimate for
  // ObjectOfPredicate contexts in fitted mode, clamped at zero.
  double estimated_rank_bits(TermId term, const RankContext& ctx) const;
  double predicate_bits(PredicateId p, const RankContext& ctx) const;

  const std::optional<PowerLawFit>& power_law(PredicateId p) const { return power_law_.at(p); }
  const Ranking& ranking(const RankContext& ctx) const;

 private:
  std::shared_ptr<const Ranking> compute_ranking(const RankContext& ctx) const;
  bool entity_before(TermId a, std::uint64_t count_a, TermId b, std::uint64_t count_b) const;
  void refresh_global_entity_ranking();

  const TripleStore* store_;
  Metric metric_ = Metric::Frequency;
  RankMode mode_;
  std::vector<std::uint32_t> predicate_rank_;
  std::vector<std::optional<PowerLawFit>> power_law_;
  bool pagerank_loaded_ = false;
  std::unordered_map<std::string, double> pagerank_rows_;
  std::unordered_map<TermId, double> pagerank_;
  std::unordered_map<TermId, std::uint64_t> global_entity_rank_;

  struct Memo;
  std::unique_ptr<Memo> memo_;
};

ProminenceModel build_frequency_model(const TripleStore& store, RankMode mode = RankMode::Exact);

}  // namespace remi
