#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "remi/search.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"
#include "support/random_kb.hpp"

using namespace remi;
using namespace remi::test;

namespace {

// Four single-atom candidates p1..p4 over object o, with hand-picked binding
// sets and costs 1, 2, 3 and 4 bits.
struct FourCandidates {
  TripleStore store;
  CandidateQueue queue;
  std::vector<TermId> targets;
};

FourCandidates four_candidates(const std::vector<std::vector<std::string>>& subjects) {
  std::vector<std::tuple<std::string, std::string, std::string>> facts;
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    for (const auto& s : subjects[i]) facts.emplace_back(s, "p" + std::to_string(i + 1), "o");
  }
  FourCandidates out{make_store(facts), {}, {}};
  for (std::size_t i = 0; i < subjects.size(); ++i) {
    auto rho = SubgraphExpression::one_atom(predicate(out.store, "p" + std::to_string(i + 1)), entity(out.store, "o"));
    out.queue.entries.push_back({rho, ComplexityBits::from_bits(static_cast<double>(i + 1)), to_string(out.store, rho)});
  }
  out.targets = {entity(out.store, "t")};
  return out;
}

SearchOptions unbounded() {
  SearchOptions opts;
  opts.bound_pruning = false;
  return opts;
}

}  // namespace

TEST_SUITE("canonical_targets") {
  TEST_CASE("sorts, dedupes and validates") {
    auto store = geo_store();
    auto g = entity(store, "Guyana"), s = entity(store, "Suriname");
    CHECK(canonical_targets(store, std::vector<TermId>{s, g, s}) == std::vector<TermId>{std::min(g, s), std::max(g, s)});
    CHECK_THROWS_AS(canonical_targets(store, std::vector<TermId>{}), std::invalid_argument);
    CHECK_THROWS_AS(canonical_targets(store, std::vector<TermId>{99999}), std::invalid_argument);
  }
}

TEST_SUITE("remi_search") {
  TEST_CASE("geo pair needs both candidates") {
    auto store = geo_store();
    auto model = build_frequency_model(store);
    std::vector<TermId> targets{entity(store, "Guyana"), entity(store, "Suriname")};
    auto result = find_referring_expression(model, targets, {}, {});
    REQUIRE(result.outcome.status == SearchStatus::Found);
    REQUIRE(result.outcome.expression);
    CHECK(result.outcome.expression->size() == 2);
    CHECK(result.outcome.expression->queue_indexes == std::vector<std::size_t>{0, 1});
    CHECK(result.outcome.bits.value() == doctest::Approx(std::log2(3.0)));
    auto canonical = canonical_targets(store, targets);
    CHECK(naive_bindings(store, *result.outcome.expression) == canonical);
  }

  TEST_CASE("single target") {
    auto store = geo_store();
    auto model = build_frequency_model(store);
    std::vector<TermId> targets{entity(store, "Brazil")};
    auto result = find_referring_expression(model, targets, {}, {});
    REQUIRE(result.outcome.status == SearchStatus::Found);
    // officialLanguage(x, Portuguese) alone costs log2 3 + log2 5; in South
    // America with a Romance language is cheaper.
    CHECK(result.outcome.expression->size() == 2);
    CHECK(result.outcome.bits.value() == doctest::Approx(std::log2(3.0) + 1.0));
    CHECK(naive_bindings(store, *result.outcome.expression) == targets);
  }

  TEST_CASE("indistinguishable entities have no referring expression") {
    auto store = make_store({{"a", "p", "c"}, {"b", "p", "c"}, {"a", "q", "d"}, {"b", "q", "d"}, {"d", "r", "e"}});
    auto model = build_frequency_model(store);
    std::vector<TermId> targets{entity(store, "a")};
    auto result = find_referring_expression(model, targets, {}, {});
    CHECK(result.outcome.status == SearchStatus::NoRE);
    CHECK_FALSE(result.outcome.expression);
    CHECK(result.outcome.bits.is_infinite());
    CHECK(result.queue.size() == 3);
    SearchOptions parallel;
    parallel.threads = 4;
    CHECK(p_remi(store, result.queue, targets, parallel).status == SearchStatus::NoRE);
    // Empty queue.
    CHECK(remi_search(store, CandidateQueue{}, targets).status == SearchStatus::NoRE);
  }

  TEST_CASE("depth and side pruning visit exactly the expected nodes") {
    auto f = four_candidates({{"t", "a", "b"}, {"t", "a", "c"}, {"t", "b", "c"}, {"t", "a", "b", "c"}});
    auto out = remi_search(f.store, f.queue, f.targets, unbounded());
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.expression->queue_indexes == std::vector<std::size_t>{0, 1, 2});
    CHECK(out.bits.value() == 6.0);
    // All 15 sequences except [0,1,2,3] (below the RE) and [0,1,3] (its
    // later sibling); [0,2] and its subtree are still explored.
    CHECK(out.stats.re_tests == 13);
    CHECK(out.stats.nodes_visited == 13);
    CHECK(out.stats.prunes_by_depth == 1);
    CHECK(out.stats.side_prunes == 1);
    CHECK(out.stats.bound_prunes == 0);
    CHECK(out.stats.queue_size == 4);

    auto bounded = remi_search(f.store, f.queue, f.targets);
    CHECK(bounded.bits == out.bits);
    CHECK(bounded.expression->queue_indexes == out.expression->queue_indexes);
    CHECK(bounded.stats.re_tests < out.stats.re_tests);
    CHECK(bounded.stats.bound_prunes > 0);
  }

  TEST_CASE("a cheaper RE in a later subtree replaces the first one") {
    // [0,1,2] costs 6, found first; [0,3] costs 5.
    auto f = four_candidates({{"t", "a", "b"}, {"t", "a", "c"}, {"t", "b", "c"}, {"t", "c"}});
    auto out = remi_search(f.store, f.queue, f.targets, unbounded());
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.expression->queue_indexes == std::vector<std::size_t>{0, 3});
    CHECK(out.bits.value() == 5.0);
  }

  TEST_CASE("an RE at the first node ends the search") {
    auto f = four_candidates({{"t"}, {"t", "a"}, {"t", "b"}, {"t", "c"}});
    auto out = remi_search(f.store, f.queue, f.targets);
    REQUIRE(out.status == SearchStatus::Found);
    CHECK(out.expression->queue_indexes == std::vector<std::size_t>{0});
    CHECK(out.stats.re_tests == 1);
    auto unb = remi_search(f.store, f.queue, f.targets, unbounded());
    CHECK(unb.expression->queue_indexes == std::vector<std::size_t>{0});
  }

  TEST_CASE("no RE in the first subtree means none at all") {
    auto f = four_candidates({{"t", "a"}, {"t", "a", "b"}, {"t", "a", "c"}, {"t", "a", "b", "c"}});
    auto out = remi_search(f.store, f.queue, f.targets, unbounded());
    CHECK(out.status == SearchStatus::NoRE);
    // Only the root 0 subtree, 8 sequences, is explored.
    CHECK(out.stats.re_tests == 8);
  }

  TEST_CASE("zero timeout") {
    auto f = four_candidates({{"t", "a", "b"}, {"t", "a", "c"}, {"t", "b", "c"}, {"t", "a", "b", "c"}});
    SearchOptions opts;
    opts.timeout = std::chrono::nanoseconds(0);
    auto out = remi_search(f.store, f.queue, f.targets, opts);
    CHECK(out.status == SearchStatus::TimedOut);
    CHECK_FALSE(out.expression);
    CHECK(out.stats.re_tests == 0);
    opts.threads = 4;
    auto par = p_remi(f.store, f.queue, f.targets, opts);
    CHECK(par.status == SearchStatus::TimedOut);
    CHECK(par.stats.re_tests == 0);
  }
}

TEST_SUITE("search against the oracle") {
  TEST_CASE("random instances") {
    std::size_t found = 0, none = 0;
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
      auto inst = make_instance(7000 + seed, 11);
      const auto& store = *inst.store;
      auto oracle = oracle_min_re(store, *inst.model, inst.queue, inst.targets, inst.queue.size());
      CHECK(oracle.nodes_enumerated == (std::size_t{1} << inst.queue.size()) - 1);

      auto seq = remi_search(store, inst.queue, inst.targets);
      auto unb = remi_search(store, inst.queue, inst.targets, unbounded());
      CHECK(seq.bits == oracle.bits);
      CHECK(unb.bits == oracle.bits);
      CHECK(seq.expression.has_value() == oracle.expression.has_value());
      if (oracle.expression) {
        ++found;
        CHECK(seq.status == SearchStatus::Found);
        // Pre-order first minimum, the same sequence as the oracle.
        CHECK(seq.expression->queue_indexes == oracle.expression->queue_indexes);
        CHECK(unb.expression->queue_indexes == oracle.expression->queue_indexes);
        CHECK(naive_bindings(store, *seq.expression) == inst.targets);
        CHECK(bits_of_expression(*inst.model, *seq.expression) == seq.bits);
      } else {
        ++none;
        CHECK(seq.status == SearchStatus::NoRE);
      }

      // Stats invariants.
      for (const auto* o : {&seq, &unb}) {
        CHECK(o->stats.re_tests <= o->stats.nodes_visited);
        CHECK(o->stats.side_prunes <= o->stats.prunes_by_depth);
        CHECK(o->stats.prunes_by_depth <= o->stats.re_tests);
        CHECK(o->stats.queue_size == inst.queue.size());
        CHECK(o->stats.nodes_visited <= oracle.nodes_enumerated);
      }
      CHECK(seq.stats.re_tests <= unb.stats.re_tests);

      for (std::size_t threads : {1, 2, 4, 8}) {
        SearchOptions opts;
        opts.threads = threads;
        auto par = p_remi(store, inst.queue, inst.targets, opts);
        CHECK(par.bits == oracle.bits);
        CHECK(par.status == seq.status);
        if (par.expression) CHECK(naive_bindings(store, *par.expression) == inst.targets);
      }

      auto again = remi_search(store, inst.queue, inst.targets);
      CHECK(again.bits == seq.bits);
      CHECK(again.stats.re_tests == seq.stats.re_tests);
      if (seq.expression) CHECK(again.expression->queue_indexes == seq.expression->queue_indexes);
    }
    // The corpus exercises both outcomes.
    CHECK(found > 0);
    CHECK(none > 0);
  }
}
