#include "remi/enumeration.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>
#include <tuple>

#include "remi/parallel.hpp"

namespace remi {

SubgraphEnumerator::SubgraphEnumerator(const TripleStore& store, EnumerationOptions options)
    : store_(&store), options_(std::move(options)) {
  auto top = top_entities(store, options_.prominent_cutoff);
  prominent_.insert(top.begin(), top.end());

  allowed_.assign(store.predicate_count(), true);
  for (PredicateId p : options_.excluded_predicates) {
    if (p < allowed_.size()) allowed_[p] = false;
  }
  if (!options_.include_inverses) {
    for (const auto& predicate : store.predicates()) {
      if (predicate.is_inverse) allowed_[predicate.id] = false;
    }
  }
}

std::vector<SubgraphExpression> SubgraphEnumerator::expressions_of(TermId t) const {
  const auto& store = *store_;
  if (t >= store.term_count() || !store.term(t).is_entity()) {
    throw std::invalid_argument("enumeration target is not an entity of the store");
  }
  std::vector<SubgraphExpression> out;
  const auto facts = store.facts_of(t);

  for (const auto& fact : facts) {
    if (allows(fact.predicate) && !store.term(fact.object).is_blank()) {
      out.push_back(SubgraphExpression::one_atom(fact.predicate, fact.object));
    }
  }

  if (options_.language == Language::Extended) {
    // Closed shapes: predicates sharing the same object y.
    std::map<TermId, std::vector<PredicateId>> by_object;
    for (const auto& fact : facts) {
      if (allows(fact.predicate) && !is_prominent(fact.object)) by_object[fact.object].push_back(fact.predicate);
    }
    for (const auto& [y, preds] : by_object) {
      for (std::size_t i = 0; i < preds.size(); ++i) {
        for (std::size_t j = i + 1; j < preds.size(); ++j) {
          out.push_back(SubgraphExpression::closed(preds[i], preds[j]));
          for (std::size_t k = j + 1; k < preds.size(); ++k) {
            out.push_back(SubgraphExpression::closed(preds[i], preds[j], preds[k]));
          }
        }
      }
    }

    // Paths and path+star through an intermediate y. Blank y is kept: the
    // path hides it.
    std::vector<PredicateObject> tails;
    for (const auto& fact : facts) {
      const auto& y = store.term(fact.object);
      if (!allows(fact.predicate) || y.is_literal() || is_prominent(fact.object)) continue;
      tails.clear();
      for (const auto& next : store.facts_of(fact.object)) {
        if (allows(next.predicate) && !store.term(next.object).is_blank()) tails.push_back(next);
      }
      for (std::size_t i = 0; i < tails.size(); ++i) {
        out.push_back(SubgraphExpression::path(fact.predicate, tails[i].predicate, tails[i].object));
        for (std::size_t j = i + 1; j < tails.size(); ++j) {
          out.push_back(SubgraphExpression::path_star(fact.predicate, tails[i].predicate, tails[i].object,
                                                      tails[j].predicate, tails[j].object));
        }
      }
    }
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<SubgraphExpression> subgraph_expressions_of_entity(const TripleStore& store, TermId t,
                                                               const EnumerationOptions& options) {
  return SubgraphEnumerator(store, options).expressions_of(t);
}

std::vector<SubgraphExpression> common_subgraphs(const TripleStore& store, std::span<const TermId> targets,
                                                 const EnumerationOptions& options, std::size_t threads) {
  if (targets.empty()) throw std::invalid_argument("common_subgraphs: empty target set");
  SubgraphEnumerator enumerator(store, options);
  std::vector<std::vector<SubgraphExpression>> per_target(targets.size());
  parallel_for(targets.size(), threads, [&](std::size_t i) { per_target[i] = enumerator.expressions_of(targets[i]); });

  // Merge in target order so the result does not depend on scheduling.
  std::vector<SubgraphExpression> common = std::move(per_target.front());
  for (std::size_t i = 1; i < per_target.size() && !common.empty(); ++i) {
    std::vector<SubgraphExpression> next;
    std::set_intersection(common.begin(), common.end(), per_target[i].begin(), per_target[i].end(),
                          std::back_inserter(next));
    common = std::move(next);
  }
  return common;
}

CandidateQueue build_queue(const ProminenceModel& model, std::span<const SubgraphExpression> candidates,
                           std::size_t threads) {
  std::vector<SubgraphExpression> unique(candidates.begin(), candidates.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  CandidateQueue queue;
  queue.entries.resize(unique.size());
  parallel_for(unique.size(), threads, [&](std::size_t i) {
    queue.entries[i] = QueueEntry{unique[i], bits_of_subgraph(model, unique[i]), to_string(model.store(), unique[i])};
  });
  std::sort(queue.entries.begin(), queue.entries.end(), [](const QueueEntry& a, const QueueEntry& b) {
    return std::tie(a.bits, a.text) < std::tie(b.bits, b.text);
  });
  return queue;
}

std::vector<SubgraphExpression> top_k_subgraphs(const CandidateQueue& queue, std::size_t k) {
  std::vector<SubgraphExpression> out;
  const auto n = std::min(k, queue.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(queue[i].expression);
  return out;
}

}  // namespace remi
