#include "remi/search.hpp"

#include <algorithm>
#include <atomic>
#include <limits>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace remi {

SearchStats& SearchStats::operator+=(const SearchStats& other) {
  nodes_visited += other.nodes_visited;
  re_tests += other.re_tests;
  prunes_by_depth += other.prunes_by_depth;
  side_prunes += other.side_prunes;
  bound_prunes += other.bound_prunes;
  return *this;
}

std::string_view to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::Found: return "found";
    case SearchStatus::NoRE: return "no_re";
    case SearchStatus::TimedOut: return "timeout";
  }
  return "?";
}

std::vector<TermId> canonical_targets(const TripleStore& store, std::span<const TermId> targets) {
  std::vector<TermId> out(targets.begin(), targets.end());
  if (out.empty()) throw std::invalid_argument("empty target set");
  for (TermId t : out) {
    if (t >= store.term_count() || !store.term(t).is_entity()) {
      throw std::invalid_argument("target is not an entity of the store");
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;
constexpr std::size_t kNoIndex = std::numeric_limits<std::size_t>::max();

struct SearchSpace {
  const CandidateQueue& queue;
  std::span<const TermId> targets;
  std::vector<std::shared_ptr<const BindingSet>> bindings;
  std::optional<Clock::time_point> deadline;
  bool bound_pruning;

  SearchSpace(const TripleStore& store, const CandidateQueue& q, std::span<const TermId> t,
              const SearchOptions& options, Clock::time_point start)
      : queue(q), targets(t), bound_pruning(options.bound_pruning) {
    bindings.reserve(q.size());
    for (const auto& entry : q.entries) bindings.push_back(shared_bindings_of_subgraph(store, entry.expression));
    if (options.timeout) deadline = start + *options.timeout;
  }

  std::size_t size() const { return queue.size(); }
  bool expired() const { return deadline && Clock::now() >= *deadline; }
};

Expression make_expression(const CandidateQueue& queue, std::span<const std::size_t> indexes) {
  Expression e;
  for (auto i : indexes) {
    e.components.push_back(queue[i].expression);
    e.queue_indexes.push_back(i);
  }
  return e;
}

// Best solution for the single-threaded search.
class SequentialCell {
 public:
  ComplexityBits best_bits() const { return bits_; }
  void offer(std::span<const std::size_t> indexes, ComplexityBits bits) {
    if (bits < bits_) {
      bits_ = bits;
      indexes_.assign(indexes.begin(), indexes.end());
    }
  }
  bool should_abort(std::size_t) const { return timed_out_; }
  void signal_timeout() { timed_out_ = true; }
  bool timed_out() const { return timed_out_; }
  bool has_solution() const { return !bits_.is_infinite(); }
  const std::vector<std::size_t>& indexes() const { return indexes_; }

 private:
  ComplexityBits bits_ = ComplexityBits::infinity();
  std::vector<std::size_t> indexes_;
  bool timed_out_ = false;
};

// Best solution and cancellation state shared by the parallel workers. The
// best complexity is mirrored in an atomic for lock-free reads; updates take
// the mutex and only ever lower it.
class SharedCell {
 public:
  ComplexityBits best_bits() const { return ComplexityBits::from_raw(best_raw_.load(std::memory_order_acquire)); }

  void offer(std::span<const std::size_t> indexes, ComplexityBits bits) {
    std::lock_guard lock(mutex_);
    if (bits.raw() < best_raw_.load(std::memory_order_relaxed)) {
      indexes_.assign(indexes.begin(), indexes.end());
      best_raw_.store(bits.raw(), std::memory_order_release);
    }
  }

  // Subtrees rooted after a subtree that holds no RE cannot hold one either.
  void cancel_after(std::size_t root) {
    auto current = cancel_from_.load();
    while (root < current && !cancel_from_.compare_exchange_weak(current, root)) {
    }
  }
  bool cancelled(std::size_t root) const { return root > cancel_from_.load(std::memory_order_acquire); }
  bool cancel_signalled() const { return cancel_from_.load() != kNoIndex; }

  bool should_abort(std::size_t root) const { return timed_out_.load(std::memory_order_acquire) || cancelled(root); }
  void signal_timeout() { timed_out_.store(true, std::memory_order_release); }
  bool timed_out() const { return timed_out_.load(); }
  bool has_solution() const { return !best_bits().is_infinite(); }
  std::vector<std::size_t> indexes() const {
    std::lock_guard lock(mutex_);
    return indexes_;
  }

 private:
  mutable std::mutex mutex_;
  std::atomic<std::int64_t> best_raw_{ComplexityBits::infinity().raw()};
  std::vector<std::size_t> indexes_;
  std::atomic<std::size_t> cancel_from_{kNoIndex};
  std::atomic<bool> timed_out_{false};
};

struct SubtreeReport {
  bool found_re = false;
  bool bound_pruned = false;
  bool aborted = false;
};

// Depth-first exploration of the subtree rooted at one queue index. The stack
// holds the index sequence of the current node together with its prefix
// complexity and, once tested, its binding set.
template <typename Cell>
class SubtreeExplorer {
 public:
  SubtreeExplorer(const SearchSpace& space, Cell& cell, SearchStats& stats)
      : space_(space), cell_(cell), stats_(stats) {}

  SubtreeReport explore(std::size_t root) {
    SubtreeReport report;
    indexes_.clear();
    bits_.clear();
    bindings_.clear();
    push(root);
    while (true) {
      if (cell_.should_abort(root)) {
        report.aborted = true;
        return report;
      }
      ++stats_.nodes_visited;
      if (space_.bound_pruning && bits_.back() >= cell_.best_bits()) {
        // Descendants and later siblings cost at least as much.
        ++stats_.bound_prunes;
        report.bound_pruned = true;
        if (!leave_node()) return report;
        continue;
      }
      if (space_.expired()) {
        cell_.signal_timeout();
        report.aborted = true;
        return report;
      }
      ++stats_.re_tests;
      const auto& node_bindings = test_bindings();
      const bool is_re = std::equal(node_bindings.begin(), node_bindings.end(), space_.targets.begin(),
                                    space_.targets.end());
      const bool has_later = indexes_.back() + 1 < space_.size();
      if (is_re) {
        report.found_re = true;
        cell_.offer(indexes_, bits_.back());
        if (has_later) {
          ++stats_.prunes_by_depth;
          if (indexes_.size() > 1) ++stats_.side_prunes;
        }
        if (!leave_node()) return report;
      } else if (has_later) {
        push(indexes_.back() + 1);
      } else if (!leave_node()) {
        return report;
      }
    }
  }

 private:
  void push(std::size_t index) {
    auto bits = space_.queue[index].bits;
    if (!bits_.empty()) bits += bits_.back();
    indexes_.push_back(index);
    bits_.push_back(bits);
  }

  void pop() {
    indexes_.pop_back();
    bits_.pop_back();
    if (bindings_.size() > indexes_.size()) bindings_.pop_back();
  }

  // Bindings of the top node; the parent is always tested before its children.
  const BindingSet& test_bindings() {
    const auto& candidate = *space_.bindings[indexes_.back()];
    if (bindings_.empty()) {
      bindings_.push_back(candidate);
    } else {
      bindings_.push_back(intersect(bindings_.back(), candidate));
    }
    return bindings_.back();
  }

  // Drops the top node with its later siblings and moves to the next sibling
  // of its parent, climbing while there is none. Returns false when the
  // subtree is exhausted.
  bool leave_node() {
    pop();
    while (indexes_.size() > 1) {
      const auto parent = indexes_.back();
      pop();
      if (parent + 1 < space_.size()) {
        push(parent + 1);
        return true;
      }
    }
    return false;
  }

  const SearchSpace& space_;
  Cell& cell_;
  SearchStats& stats_;
  std::vector<std::size_t> indexes_;
  std::vector<ComplexityBits> bits_;
  std::vector<BindingSet> bindings_;
};

template <typename Cell>
SearchOutcome finish(const CandidateQueue& queue, const Cell& cell, SearchStats stats, Clock::time_point start) {
  SearchOutcome outcome;
  stats.queue_size = queue.size();
  stats.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  outcome.stats = stats;
  if (cell.has_solution()) {
    outcome.expression = make_expression(queue, cell.indexes());
    outcome.bits = cell.best_bits();
  }
  if (cell.timed_out()) {
    outcome.status = SearchStatus::TimedOut;
  } else {
    outcome.status = cell.has_solution() ? SearchStatus::Found : SearchStatus::NoRE;
  }
  return outcome;
}

}  // namespace

SearchOutcome remi_search(const TripleStore& store, const CandidateQueue& queue, std::span<const TermId> targets,
                          const SearchOptions& options) {
  const auto start = Clock::now();
  auto canonical = canonical_targets(store, targets);
  SearchSpace space(store, queue, canonical, options, start);
  SequentialCell cell;
  SearchStats stats;
  SubtreeExplorer<SequentialCell> explorer(space, cell, stats);

  for (std::size_t root = 0; root < queue.size(); ++root) {
    if (space.bound_pruning && queue[root].bits >= cell.best_bits()) {
      // Every remaining root costs at least as much as the best RE.
      ++stats.bound_prunes;
      break;
    }
    explorer.explore(root);
    if (cell.timed_out()) break;
    // The first subtree contains the conjunction of every candidate; if no RE
    // has been found by now none exists.
    if (!cell.has_solution()) break;
  }
  return finish(queue, cell, stats, start);
}

SearchOutcome p_remi(const TripleStore& store, const CandidateQueue& queue, std::span<const TermId> targets,
                     const SearchOptions& options) {
  const auto start = Clock::now();
  auto canonical = canonical_targets(store, targets);
  SearchSpace space(store, queue, canonical, options, start);
  SharedCell cell;
  std::atomic<std::size_t> next_root{0};
  std::mutex stats_mutex;
  SearchStats total;

  auto worker = [&] {
    SearchStats local;
    SubtreeExplorer<SharedCell> explorer(space, cell, local);
    while (true) {
      const std::size_t root = next_root++;
      if (root >= queue.size() || cell.should_abort(root)) break;
      if (space.bound_pruning && queue[root].bits >= cell.best_bits()) {
        ++local.bound_prunes;
        break;
      }
      auto report = explorer.explore(root);
      // Only a complete, unbounded exploration proves the subtree RE-free.
      if (!report.aborted && !report.found_re && !report.bound_pruned) cell.cancel_after(root);
    }
    std::lock_guard lock(stats_mutex);
    total += local;
  };

  const auto threads = std::max<std::size_t>(1, options.threads);
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  return finish(queue, cell, total, start);
}

OracleResult oracle_min_re(const TripleStore& store, const ProminenceModel& model, const CandidateQueue& queue,
                           std::span<const TermId> targets, std::size_t max_components) {
  auto canonical = canonical_targets(store, targets);
  OracleResult result;
  std::vector<std::size_t> sequence;

  auto visit = [&](auto&& self, std::size_t first) -> void {
    if (sequence.size() >= max_components) return;
    for (std::size_t i = first; i < queue.size(); ++i) {
      sequence.push_back(i);
      ++result.nodes_enumerated;
      auto e = make_expression(queue, sequence);
      if (is_referring_expression(store, e, canonical)) {
        auto bits = bits_of_expression(model, e);
        if (bits < result.bits) {
          result.bits = bits;
          result.expression = std::move(e);
        }
      }
      self(self, i + 1);
      sequence.pop_back();
    }
  };
  visit(visit, 0);
  return result;
}

DescribeResult find_referring_expression(const ProminenceModel& model, std::span<const TermId> targets,
                                         const EnumerationOptions& enumeration, const SearchOptions& search) {
  const auto& store = model.store();
  auto canonical = canonical_targets(store, targets);
  DescribeResult result;
  auto candidates = common_subgraphs(store, canonical, enumeration, search.threads);
  result.queue = build_queue(model, candidates, search.threads);
  result.outcome = search.threads > 1 ? p_remi(store, result.queue, canonical, search)
                                      : remi_search(store, result.queue, canonical, search);
  return result;
}

}  // namespace remi
