#include "remi/prominence.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>

namespace remi {

std::size_t RankContextHash::operator()(const RankContext& ctx) const noexcept {
  std::size_t h = static_cast<std::size_t>(ctx.kind) * 0x9e3779b97f4a7c15ULL;
  for (auto p : ctx.predicates) h = (h ^ p) * 1099511628211ULL;
  return h;
}

double PowerLawFit::estimate_bits(double frequency) const {
  return std::max(0.0, -alpha * std::log2(frequency) + beta);
}

std::optional<PowerLawFit> fit_rank_frequency(std::span<const RankedFrequency> points) {
  if (points.size() < 2) return std::nullopt;
  const auto n = static_cast<double>(points.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (const auto& pt : points) {
    mean_x += std::log2(static_cast<double>(pt.frequency));
    mean_y += std::log2(static_cast<double>(pt.rank));
  }
  mean_x /= n;
  mean_y /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& pt : points) {
    double dx = std::log2(static_cast<double>(pt.frequency)) - mean_x;
    double dy = std::log2(static_cast<double>(pt.rank)) - mean_y;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0.0) return std::nullopt;
  const double slope = sxy / sxx;
  PowerLawFit fit;
  fit.alpha = -slope;
  fit.beta = mean_y - slope * mean_x;
  fit.sample_size = points.size();
  // For a one-variable least-squares line R² is the squared correlation.
  fit.r_squared = syy > 0.0 ? std::clamp((sxy * sxy) / (sxx * syy), 0.0, 1.0) : 1.0;
  return fit;
}

namespace {

// Objects of p with their conditional frequency, most frequent first, ties
// by global frequency then lexical form.
std::vector<ObjectCount> ranked_objects_by_frequency(const TripleStore& store, PredicateId p) {
  std::vector<ObjectCount> objects;
  for (const auto& oc : store.objects_of(p)) {
    if (!store.term(oc.object).is_blank()) objects.push_back(oc);
  }
  std::sort(objects.begin(), objects.end(), [&store](const ObjectCount& a, const ObjectCount& b) {
    if (a.count != b.count) return a.count > b.count;
    auto fa = store.frequency(a.object), fb = store.frequency(b.object);
    if (fa != fb) return fa > fb;
    const auto& la = store.term(a.object).lexical;
    const auto& lb = store.term(b.object).lexical;
    if (la != lb) return la < lb;
    return a.object < b.object;
  });
  return objects;
}

std::span<const PredicateObject> facts_with_predicate(const TripleStore& store, TermId subject, PredicateId p) {
  auto facts = store.facts_of(subject);
  auto lo = std::lower_bound(facts.begin(), facts.end(), p,
                             [](const PredicateObject& f, PredicateId q) { return f.predicate < q; });
  auto hi = std::upper_bound(lo, facts.end(), p,
                             [](PredicateId q, const PredicateObject& f) { return q < f.predicate; });
  return {lo, hi};
}

}  // namespace

std::optional<PowerLawFit> fit_power_law(const TripleStore& store, PredicateId p) {
  auto objects = ranked_objects_by_frequency(store, p);
  std::vector<RankedFrequency> points;
  points.reserve(objects.size());
  for (std::size_t i = 0; i < objects.size(); ++i) points.push_back({i + 1, objects[i].count});
  return fit_rank_frequency(points);
}

struct ProminenceModel::Memo {
  std::mutex mutex;
  std::unordered_map<RankContext, std::shared_ptr<const Ranking>, RankContextHash> rankings;
};

ProminenceModel::ProminenceModel(const TripleStore& store, RankMode mode)
    : store_(&store), mode_(mode), memo_(std::make_unique<Memo>()) {
  const auto n = store.predicate_count();
  std::vector<PredicateId> order(n);
  for (PredicateId p = 0; p < n; ++p) order[p] = p;
  std::sort(order.begin(), order.end(), [&store](PredicateId a, PredicateId b) {
    auto ca = store.fact_count(a), cb = store.fact_count(b);
    if (ca != cb) return ca > cb;
    return store.predicate(a).lexical < store.predicate(b).lexical;
  });
  predicate_rank_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) predicate_rank_[order[i]] = static_cast<std::uint32_t>(i + 1);

  power_law_.reserve(n);
  for (PredicateId p = 0; p < n; ++p) power_law_.push_back(fit_power_law(store, p));

  refresh_global_entity_ranking();
}

ProminenceModel::ProminenceModel(ProminenceModel&&) noexcept = default;
ProminenceModel::~ProminenceModel() = default;

ProminenceModel build_frequency_model(const TripleStore& store, RankMode mode) {
  return ProminenceModel(store, mode);
}

void ProminenceModel::set_metric(Metric metric) {
  metric_ = metric;
  refresh_global_entity_ranking();
  std::lock_guard lock(memo_->mutex);
  memo_->rankings.clear();
}

void ProminenceModel::set_mode(RankMode mode) { mode_ = mode; }

void ProminenceModel::load_pagerank(std::istream& rows) {
  std::string line;
  std::size_t row = 0;
  std::unordered_map<std::string, double> parsed;
  while (std::getline(rows, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    auto sep = line.find_first_of(" \t", first);
    if (sep == std::string::npos) throw ParseError(row, "expected <iri>\\t<score>");
    std::string iri = line.substr(first, sep - first);
    if (iri.size() >= 2 && iri.front() == '<' && iri.back() == '>') iri = iri.substr(1, iri.size() - 2);
    auto score_begin = line.find_first_not_of(" \t", sep);
    auto score_end = line.find_last_not_of(" \t");
    if (score_begin == std::string::npos) throw ParseError(row, "missing score");
    double score = 0.0;
    const char* begin = line.data() + score_begin;
    const char* end = line.data() + score_end + 1;
    auto [ptr, ec] = std::from_chars(begin, end, score);
    if (ec != std::errc() || ptr != end) throw ParseError(row, "unparseable score");
    if (!std::isfinite(score) || score < 0.0) throw ParseError(row, "score must be finite and non-negative");
    parsed[iri] = score;
  }
  for (auto& [iri, score] : parsed) pagerank_rows_[iri] = score;
  pagerank_.clear();
  for (const auto& [iri, score] : pagerank_rows_) {
    if (auto id = store_->find_entity(iri)) pagerank_[*id] = score;
  }
  pagerank_loaded_ = true;
  refresh_global_entity_ranking();
  std::lock_guard lock(memo_->mutex);
  memo_->rankings.clear();
}

std::optional<double> ProminenceModel::pagerank(TermId term) const {
  auto it = pagerank_.find(term);
  if (it == pagerank_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ProminenceModel::pagerank(const std::string& iri) const {
  auto it = pagerank_rows_.find(iri);
  if (it == pagerank_rows_.end()) return std::nullopt;
  return it->second;
}

bool ProminenceModel::entity_before(TermId a, std::uint64_t count_a, TermId b, std::uint64_t count_b) const {
  if (metric_ == Metric::PageRank) {
    auto pa = pagerank(a), pb = pagerank(b);
    if (pa.has_value() != pb.has_value()) return pa.has_value();
    if (pa && *pa != *pb) return *pa > *pb;
  }
  if (count_a != count_b) return count_a > count_b;
  auto fa = store_->frequency(a), fb = store_->frequency(b);
  if (fa != fb) return fa > fb;
  const auto& la = store_->term(a).lexical;
  const auto& lb = store_->term(b).lexical;
  if (la != lb) return la < lb;
  return a < b;
}

void ProminenceModel::refresh_global_entity_ranking() {
  std::vector<TermId> entities;
  for (const auto& term : store_->terms()) {
    if (term.is_entity()) entities.push_back(term.id);
  }
  // Under fr the conditional count is the global frequency itself.
  std::sort(entities.begin(), entities.end(), [this](TermId a, TermId b) {
    return entity_before(a, store_->frequency(a), b, store_->frequency(b));
  });
  global_entity_rank_.clear();
  for (std::size_t i = 0; i < entities.size(); ++i) global_entity_rank_[entities[i]] = i + 1;
}

std::optional<std::uint64_t> ProminenceModel::global_entity_rank(TermId term) const {
  auto it = global_entity_rank_.find(term);
  if (it == global_entity_rank_.end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const Ranking> ProminenceModel::compute_ranking(const RankContext& ctx) const {
  const auto& store = *store_;
  const auto p0 = ctx.predicates[0];
  const auto p1 = ctx.predicates[1];
  const auto p2 = ctx.predicates[2];
  std::map<std::uint32_t, std::uint64_t> counts;

  switch (ctx.kind) {
    case RankContext::Kind::GlobalPredicate:
      for (PredicateId p = 0; p < store.predicate_count(); ++p) counts[p] = store.fact_count(p);
      break;
    case RankContext::Kind::ObjectOfPredicate:
      for (const auto& oc : store.objects_of(p0)) counts[oc.object] += oc.count;
      break;
    case RankContext::Kind::JoinPredicate:
      for (const auto& y : store.objects_of(p0)) {
        for (const auto& fact : store.facts_of(y.object)) counts[fact.predicate] += y.count;
      }
      break;
    case RankContext::Kind::ObjectOfJoin:
      for (const auto& y : store.objects_of(p0)) {
        for (const auto& fact : facts_with_predicate(store, y.object, p1)) counts[fact.object] += y.count;
      }
      break;
    case RankContext::Kind::StarPredicate:
      for (const auto& y : store.objects_of(p0)) {
        const std::uint64_t z = facts_with_predicate(store, y.object, p1).size();
        if (z == 0) continue;
        std::map<PredicateId, std::uint64_t> per_predicate;
        for (const auto& fact : store.facts_of(y.object)) ++per_predicate[fact.predicate];
        for (const auto& [q, n] : per_predicate) {
          std::uint64_t pairs = z * n - (q == p1 ? z : 0);
          if (pairs > 0) counts[q] += y.count * pairs;
        }
      }
      break;
    case RankContext::Kind::ObjectOfStar:
      for (const auto& y : store.objects_of(p0)) {
        const std::uint64_t z = facts_with_predicate(store, y.object, p1).size();
        const std::uint64_t partners = z - (p1 == p2 && z > 0 ? 1 : 0);
        if (partners == 0) continue;
        for (const auto& fact : facts_with_predicate(store, y.object, p2)) {
          counts[fact.object] += y.count * partners;
        }
      }
      break;
    case RankContext::Kind::ClosingPredicate:
      for (const auto& pair : store.pairs_of(p0)) {
        auto shared = store.links(pair.subject, pair.object);
        if (p1 != kNoId && !std::binary_search(shared.begin(), shared.end(), p1)) continue;
        for (PredicateId q : shared) {
          if (q != p0 && q != p1) ++counts[q];
        }
      }
      break;
  }

  auto ranking = std::make_shared<Ranking>();
  for (const auto& [candidate, count] : counts) {
    if (count == 0) continue;
    if (ctx.ranks_entities() && store.term(candidate).is_blank()) continue;
    ranking->order.push_back(candidate);
    ranking->count_of[candidate] = count;
  }
  if (ctx.ranks_entities()) {
    std::sort(ranking->order.begin(), ranking->order.end(), [&](std::uint32_t a, std::uint32_t b) {
      return entity_before(a, ranking->count_of[a], b, ranking->count_of[b]);
    });
  } else {
    std::sort(ranking->order.begin(), ranking->order.end(), [&](std::uint32_t a, std::uint32_t b) {
      auto ca = ranking->count_of[a], cb = ranking->count_of[b];
      if (ca != cb) return ca > cb;
      return predicate_rank_[a] < predicate_rank_[b];
    });
  }
  for (std::size_t i = 0; i < ranking->order.size(); ++i) ranking->rank_of[ranking->order[i]] = i + 1;
  return ranking;
}

const Ranking& ProminenceModel::ranking(const RankContext& ctx) const {
  {
    std::lock_guard lock(memo_->mutex);
    auto it = memo_->rankings.find(ctx);
    if (it != memo_->rankings.end()) return *it->second;
  }
  auto computed = compute_ranking(ctx);
  std::lock_guard lock(memo_->mutex);
  auto [it, inserted] = memo_->rankings.emplace(ctx, std::move(computed));
  return *it->second;
}

std::uint64_t ProminenceModel::conditional_entity_rank(TermId term, const RankContext& ctx) const {
  if (!ctx.ranks_entities()) throw std::invalid_argument("context does not rank entities");
  const auto& r = ranking(ctx);
  auto it = r.rank_of.find(term);
  if (it == r.rank_of.end()) throw NotACandidate("term is not a candidate binding under the context");
  return it->second;
}

std::uint64_t ProminenceModel::conditional_predicate_rank(PredicateId p, const RankContext& ctx) const {
  if (ctx.ranks_entities()) throw std::invalid_argument("context does not rank predicates");
  if (ctx.kind == RankContext::Kind::GlobalPredicate) {
    if (p >= predicate_rank_.size()) throw NotACandidate("unknown predicate");
    return predicate_rank_[p];
  }
  const auto& r = ranking(ctx);
  auto it = r.rank_of.find(p);
  if (it == r.rank_of.end()) throw NotACandidate("predicate is not joinable under the context");
  return it->second;
}

double ProminenceModel::estimated_rank_bits(TermId term, const RankContext& ctx) const {
  if (mode_ == RankMode::Fitted && ctx.kind == RankContext::Kind::ObjectOfPredicate) {
    const auto p = ctx.predicates[0];
    if (p < power_law_.size() && power_law_[p]) {
      auto frequency = store_->subjects_of(p, term).size();
      if (frequency == 0 || store_->term(term).is_blank()) {
        throw NotACandidate("term is not an object of the predicate");
      }
      return power_law_[p]->estimate_bits(static_cast<double>(frequency));
    }
  }
  return std::log2(static_cast<double>(conditional_entity_rank(term, ctx)));
}

double ProminenceModel::predicate_bits(PredicateId p, const RankContext& ctx) const {
  return std::log2(static_cast<double>(conditional_predicate_rank(p, ctx)));
}

}  // namespace remi
