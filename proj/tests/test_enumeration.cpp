#include <algorithm>
#include <random>

#include "doctest.h"
#include "remi/enumeration.hpp"
#include "support/fixtures.hpp"
#include "support/naive.hpp"
#include "support/random_kb.hpp"

using namespace remi;
using namespace remi::test;

namespace {

EnumerationOptions no_pruning() {
  EnumerationOptions opts;
  opts.prominent_cutoff = 0.0;
  return opts;
}

bool contains(const std::vector<SubgraphExpression>& v, const SubgraphExpression& rho) {
  return std::binary_search(v.begin(), v.end(), rho);
}

// Whether some non-prominent intermediate y of t supports the multi-atom rho.
bool has_open_witness(const TripleStore& store, const SubgraphEnumerator& en, TermId t,
                      const SubgraphExpression& rho) {
  const auto& p = rho.predicates;
  const auto& o = rho.objects;
  if (rho.shape == Shape::OneAtom) return true;
  for (const auto& fact : store.facts_of(t)) {
    if (fact.predicate != p[0] || en.is_prominent(fact.object)) continue;
    const TermId y = fact.object;
    switch (rho.shape) {
      case Shape::Closed2:
        if (store.contains(t, p[1], y)) return true;
        break;
      case Shape::Closed3:
        if (store.contains(t, p[1], y) && store.contains(t, p[2], y)) return true;
        break;
      case Shape::Path:
        if (!store.term(y).is_literal() && store.contains(y, p[1], o[1])) return true;
        break;
      case Shape::PathStar:
        if (!store.term(y).is_literal() && store.contains(y, p[1], o[1]) && store.contains(y, p[2], o[2])) return true;
        break;
      case Shape::OneAtom:
        break;
    }
  }
  return false;
}

TripleStore random_store(std::uint64_t seed, std::size_t blanks, std::size_t entities = 14) {
  std::mt19937_64 rng(seed);
  RandomKbParams params;
  params.entities = entities;
  params.predicates = 4;
  params.triples = entities * 4;
  params.blanks = blanks;
  auto raw = parse_ntriples(random_ntriples(rng, params));
  return materialize_inverses(raw, seed % 2 ? 0.1 : 0.0);
}

}  // namespace

TEST_SUITE("subgraph enumeration") {
  TEST_CASE("a single fact gives a single expression") {
    auto store = make_store({{"a", "p", "b"}});
    auto out = subgraph_expressions_of_entity(store, entity(store, "a"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == SubgraphExpression::one_atom(predicate(store, "p"), entity(store, "b")));
    CHECK(subgraph_expressions_of_entity(store, entity(store, "b")).empty());
  }

  TEST_CASE("non-entity targets are rejected") {
    auto store = make_store({{"a", "p", "\"lit\""}, {"_:x", "p", "a"}});
    auto lit = store.find_term(TermKind::Literal, "\"lit\"");
    REQUIRE(lit);
    CHECK_THROWS_AS(subgraph_expressions_of_entity(store, *lit), std::invalid_argument);
    CHECK_THROWS_AS(subgraph_expressions_of_entity(store, 9999), std::invalid_argument);
  }

  TEST_CASE("a path hides a blank node") {
    auto store = make_store({{"Alice", "address", "_:b1"}, {"_:b1", "city", "Paris"}});
    auto out = subgraph_expressions_of_entity(store, entity(store, "Alice"));
    REQUIRE(out.size() == 1);
    CHECK(out[0] == SubgraphExpression::path(predicate(store, "address"), predicate(store, "city"),
                                             entity(store, "Paris")));
  }

  TEST_CASE("geo expressions of Guyana") {
    auto store = geo_store();
    auto out = subgraph_expressions_of_entity(store, entity(store, "Guyana"));
    auto in = predicate(store, "in"), lang = predicate(store, "officialLanguage"),
         family = predicate(store, "langFamily");
    std::vector<SubgraphExpression> expected{
        SubgraphExpression::one_atom(in, entity(store, "SouthAmerica")),
        SubgraphExpression::one_atom(lang, entity(store, "English")),
        SubgraphExpression::path(lang, family, entity(store, "Germanic")),
    };
    std::sort(expected.begin(), expected.end());
    CHECK(out == expected);
  }

  TEST_CASE("standard language keeps single atoms only") {
    auto store = geo_store();
    EnumerationOptions opts;
    opts.language = Language::Standard;
    auto out = subgraph_expressions_of_entity(store, entity(store, "Guyana"), opts);
    CHECK(out.size() == 2);
    for (const auto& rho : out) CHECK(rho.shape == Shape::OneAtom);
  }

  TEST_CASE("closed shapes and stars") {
    auto store = make_store({{"a", "p", "b"}, {"a", "q", "b"}, {"a", "r", "b"},
                             {"b", "s", "c"}, {"b", "t", "d"}});
    auto out = subgraph_expressions_of_entity(store, entity(store, "a"), no_pruning());
    auto p = predicate(store, "p"), q = predicate(store, "q"), r = predicate(store, "r"),
         s = predicate(store, "s"), t = predicate(store, "t");
    CHECK(contains(out, SubgraphExpression::closed(p, q)));
    CHECK(contains(out, SubgraphExpression::closed(r, q)));
    CHECK(contains(out, SubgraphExpression::closed(q, r, p)));
    CHECK(contains(out, SubgraphExpression::path_star(p, t, entity(store, "d"), s, entity(store, "c"))));
    // 3 atoms, 3 pairs + 1 triple of closed, 3 * (2 paths + 1 star).
    CHECK(out.size() == 3 + 4 + 9);
    for (const auto& rho : out) CHECK(rho.is_canonical());
  }

  TEST_CASE("prominent objects are not extended") {
    std::vector<std::tuple<std::string, std::string, std::string>> facts;
    for (int i = 0; i < 25; ++i) facts.emplace_back("e" + std::to_string(i), "link", "hub");
    facts.emplace_back("t", "p", "hub");
    facts.emplace_back("hub", "q", "z");
    auto store = make_store(facts);
    auto t = entity(store, "t");
    auto path = SubgraphExpression::path(predicate(store, "p"), predicate(store, "q"), entity(store, "z"));
    auto atom = SubgraphExpression::one_atom(predicate(store, "p"), entity(store, "hub"));
    auto pruned = subgraph_expressions_of_entity(store, t);
    CHECK(contains(pruned, atom));
    CHECK_FALSE(contains(pruned, path));
    auto full = subgraph_expressions_of_entity(store, t, no_pruning());
    CHECK(contains(full, atom));
    CHECK(contains(full, path));
  }

  TEST_CASE("excluded and inverse predicates are filtered") {
    auto raw = geo_store();
    auto store = materialize_inverses(raw, 0.5);
    auto inverse = store.find_predicate(ex("in") + std::string(kInverseSuffix));
    REQUIRE(inverse);
    auto sa = entity(store, "SouthAmerica");
    CHECK_FALSE(subgraph_expressions_of_entity(store, sa).empty());

    EnumerationOptions no_inv;
    no_inv.include_inverses = false;
    for (const auto& rho : subgraph_expressions_of_entity(store, sa, no_inv)) {
      for (auto p : rho.used_predicates()) CHECK_FALSE(store.predicate(p).is_inverse);
    }

    EnumerationOptions excl;
    excl.excluded_predicates = {predicate(store, "in")};
    for (const auto& term : store.terms()) {
      if (!term.is_entity()) continue;
      for (const auto& rho : subgraph_expressions_of_entity(store, term.id, excl)) {
        for (auto p : rho.used_predicates()) CHECK(p != predicate(store, "in"));
      }
    }
  }

  TEST_CASE("completeness against brute force without pruning") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto store = random_store(seed, seed % 3 == 0 ? 3 : 0);
      for (const auto& term : store.terms()) {
        if (!term.is_entity()) continue;
        CHECK(subgraph_expressions_of_entity(store, term.id, no_pruning()) ==
              brute_force_expressions(store, term.id));
      }
    }
  }

  TEST_CASE("soundness, idempotence and the prominence rule") {
    for (std::uint64_t seed = 0; seed < 15; ++seed) {
      auto store = random_store(100 + seed, seed % 2 ? 2 : 0, 40);
      SubgraphEnumerator en(store, EnumerationOptions{});
      REQUIRE(store.entity_count() >= 20);
      for (const auto& term : store.terms()) {
        if (!term.is_entity()) continue;
        auto out = en.expressions_of(term.id);
        CHECK(out == en.expressions_of(term.id));
        CHECK(std::is_sorted(out.begin(), out.end()));
        for (const auto& rho : out) {
          auto b = naive_bindings(store, rho.atoms());
          CHECK(std::binary_search(b.begin(), b.end(), term.id));
        }
        // Exactly the brute-force expressions with a non-prominent witness.
        for (const auto& rho : brute_force_expressions(store, term.id)) {
          CHECK(contains(out, rho) == has_open_witness(store, en, term.id, rho));
        }
      }
    }
  }
}

TEST_SUITE("common subgraphs and the queue") {
  TEST_CASE("geo common subgraphs and queue order") {
    auto store = geo_store();
    auto model = build_frequency_model(store);
    std::vector<TermId> targets{entity(store, "Guyana"), entity(store, "Suriname")};
    std::sort(targets.begin(), targets.end());
    auto common = common_subgraphs(store, targets);
    REQUIRE(common.size() == 2);
    auto queue = build_queue(model, common);
    REQUIRE(queue.size() == 2);
    CHECK(queue[0].expression ==
          SubgraphExpression::one_atom(predicate(store, "in"), entity(store, "SouthAmerica")));
    CHECK(queue[0].bits.raw() == 0);
    CHECK(queue[1].expression.shape == Shape::Path);
    CHECK(queue[0].text == to_string(store, queue[0].expression));
    CHECK_THROWS(common_subgraphs(store, std::vector<TermId>{}));
  }

  TEST_CASE("ties are broken by canonical text") {
    auto store = make_store({{"a", "p", "z"}, {"a", "p", "y"}, {"b", "p", "z"}, {"b", "p", "y"}});
    auto model = build_frequency_model(store);
    auto queue = build_queue(model, subgraph_expressions_of_entity(store, entity(store, "a")));
    REQUIRE(queue.size() == 2);
    // y and z tie on count and fr; y has the smaller IRI and rank 1.
    CHECK(queue[0].expression.objects[0] == entity(store, "y"));
    CHECK(queue[1].bits.value() == 1.0);
  }

  TEST_CASE("queue invariants, threading and top-k on random instances") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      auto inst = make_instance(300 + seed, 40);
      const auto& store = *inst.store;
      // The intersection law.
      std::vector<SubgraphExpression> expected;
      for (std::size_t i = 0; i < inst.targets.size(); ++i) {
        auto own = subgraph_expressions_of_entity(store, inst.targets[i]);
        if (i == 0) {
          expected = own;
        } else {
          std::vector<SubgraphExpression> next;
          std::set_intersection(expected.begin(), expected.end(), own.begin(), own.end(), std::back_inserter(next));
          expected = next;
        }
      }
      auto common = common_subgraphs(store, inst.targets);
      CHECK(common == expected);
      CHECK(common_subgraphs(store, inst.targets, {}, 4) == common);

      auto& q = inst.queue;
      CHECK(q.size() == common.size());
      for (std::size_t i = 1; i < q.size(); ++i) {
        CHECK(std::tie(q[i - 1].bits, q[i - 1].text) < std::tie(q[i].bits, q[i].text));
      }
      auto threaded = build_queue(*inst.model, common, 4);
      REQUIRE(threaded.size() == q.size());
      for (std::size_t i = 0; i < q.size(); ++i) CHECK(threaded[i].expression == q[i].expression);

      CHECK(top_k_subgraphs(q, 0).empty());
      auto all = top_k_subgraphs(q, q.size() + 10);
      CHECK(all.size() == q.size());
      auto three = top_k_subgraphs(q, 3);
      CHECK(three.size() == std::min<std::size_t>(3, q.size()));
      for (std::size_t i = 0; i < three.size(); ++i) CHECK(three[i] == q[i].expression);
    }
  }
}
