#pragma once

// Reference evaluators that read only the flat triple list, never the store's
// indexes or cache.

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "remi/expression.hpp"
#include "remi/kb_store.hpp"

namespace remi::test {

// Root bindings of a conjunction of atoms by backtracking over all triples.
inline BindingSet naive_bindings(const TripleStore& store, const std::vector<Atom>& atoms) {
  std::set<TermId> roots;
  std::map<Variable, TermId> sigma;
  auto triples = store.triples();

  auto unify = [&](const Argument& arg, TermId value, std::vector<Variable>& bound) {
    if (const auto* var = std::get_if<Variable>(&arg)) {
      auto it = sigma.find(*var);
      if (it != sigma.end()) return it->second == value;
      sigma[*var] = value;
      bound.push_back(*var);
      return true;
    }
    return std::get<TermId>(arg) == value;
  };

  auto solve = [&](auto&& self, std::size_t i) -> void {
    if (i == atoms.size()) {
      roots.insert(sigma.at(Variable::X));
      return;
    }
    for (const auto& t : triples) {
      if (t.predicate != atoms[i].predicate) continue;
      std::vector<Variable> bound;
      if (unify(atoms[i].subject, t.subject, bound) && unify(atoms[i].object, t.object, bound)) self(self, i + 1);
      for (auto v : bound) sigma.erase(v);
    }
  };
  solve(solve, 0);
  return {roots.begin(), roots.end()};
}

// Naive full join of a conjunction of subgraph expressions. Each component
// gets its own copy of y, matching the "share only x" semantics.
inline BindingSet naive_bindings(const TripleStore& store, const Expression& e) {
  std::vector<TermId> result;
  bool first = true;
  for (const auto& rho : e.components) {
    auto b = naive_bindings(store, rho.atoms());
    if (first) {
      result = b;
      first = false;
    } else {
      result = intersect(result, b);
    }
  }
  return result;
}

// Every matched subgraph expression of t, built from triple scans with no
// pruning heuristics. Blank objects are never bound constants.
inline std::vector<SubgraphExpression> brute_force_expressions(const TripleStore& store, TermId t) {
  std::set<SubgraphExpression> out;
  std::vector<Triple> from_t;
  for (const auto& tr : store.triples()) {
    if (tr.subject == t) from_t.push_back(tr);
  }
  auto blank = [&](TermId id) { return store.term(id).is_blank(); };
  for (const auto& a : from_t) {
    if (!blank(a.object)) out.insert(SubgraphExpression::one_atom(a.predicate, a.object));
    for (const auto& b : from_t) {
      if (b.object != a.object || b.predicate <= a.predicate) continue;
      out.insert(SubgraphExpression::closed(a.predicate, b.predicate));
      for (const auto& c : from_t) {
        if (c.object == a.object && c.predicate > b.predicate) {
          out.insert(SubgraphExpression::closed(a.predicate, b.predicate, c.predicate));
        }
      }
    }
    if (store.term(a.object).is_literal()) continue;
    std::vector<Triple> tails;
    for (const auto& tr : store.triples()) {
      if (tr.subject == a.object && !blank(tr.object)) tails.push_back(tr);
    }
    for (const auto& b : tails) {
      out.insert(SubgraphExpression::path(a.predicate, b.predicate, b.object));
      for (const auto& c : tails) {
        if (std::tie(b.predicate, b.object) < std::tie(c.predicate, c.object)) {
          out.insert(SubgraphExpression::path_star(a.predicate, b.predicate, b.object, c.predicate, c.object));
        }
      }
    }
  }
  return {out.begin(), out.end()};
}

}  // namespace remi::test
