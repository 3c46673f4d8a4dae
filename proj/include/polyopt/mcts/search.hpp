#pragma once

#include "polyopt/core/count.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/random.hpp"
#include "polyopt/horner/scheme.hpp"
#include "polyopt/simplify/cse.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <thread>
#include <unordered_map>
#include <vector>

namespace polyopt {

struct MctsSettings {
  double cp = 1.0;
  std::size_t num_expand = 1000;
  std::size_t num_keep = 10;
  std::size_t num_repeat = 1;
  double time_limit_seconds = 0.0;
  Direction direction = Direction::ForwardOrBackward;
  std::uint64_t seed = 0;
  // Independent trees are searched on this many threads; 1 is sequential.
  unsigned threads = 1;

  void validate() const {
    if (!(cp >= 0.0) || !std::isfinite(cp)) throw std::invalid_argument("cp must be a nonnegative number");
    if (num_expand < 1) throw std::invalid_argument("numExpand must be at least 1");
    if (num_keep < 1) throw std::invalid_argument("numKeep must be at least 1");
    if (num_repeat < 1) throw std::invalid_argument("numRepeat must be at least 1");
    if (time_limit_seconds < 0.0) throw std::invalid_argument("time limit must not be negative");
    if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  }
};

enum class Side : std::uint8_t { Front, Back };

struct SearchNode {
  std::optional<VarId> chosen;  // empty at the root
  Side side = Side::Front;
  std::uint64_t visits = 0;
  double score_sum = 0.0;
  bool expanded = false;
  std::vector<SearchNode> children;

  double mean() const { return visits == 0 ? 0.0 : score_sum / static_cast<double>(visits); }
};

inline double uct_value(const SearchNode& child, std::uint64_t parent_visits, double cp) {
  if (child.visits == 0) return std::numeric_limits<double>::infinity();
  const double n = static_cast<double>(parent_visits);
  const double ni = static_cast<double>(child.visits);
  return child.mean() + 2.0 * cp * std::sqrt(2.0 * std::log(n) / ni);
}

// Child with the highest UCT value; the lowest index wins ties.
inline std::size_t uct_select(const SearchNode& parent, double cp) {
  if (parent.children.empty()) throw std::invalid_argument("node has no children");
  std::size_t best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < parent.children.size(); ++i) {
    const double v = uct_value(parent.children[i], parent.visits, cp);
    if (v > best_value) {
      best = i;
      best_value = v;
    }
  }
  return best;
}

struct PartialOrder {
  std::vector<VarId> front;  // outermost first
  std::vector<VarId> back;   // innermost first
};

// Fills the unplaced variables between front and back in random order.
inline HornerOrder complete_order(const PartialOrder& partial, std::span<const VarId> variables, Rng& rng) {
  std::vector<VarId> rest;
  for (VarId v : variables)
    if (std::find(partial.front.begin(), partial.front.end(), v) == partial.front.end() &&
        std::find(partial.back.begin(), partial.back.end(), v) == partial.back.end())
      rest.push_back(v);
  shuffle(rest, rng);
  HornerOrder order;
  order.sequence = partial.front;
  order.sequence.insert(order.sequence.end(), rest.begin(), rest.end());
  order.sequence.insert(order.sequence.end(), partial.back.rbegin(), partial.back.rend());
  order.construction = partial.back.empty()    ? OrderConstruction::FrontOnly
                       : partial.front.empty() ? OrderConstruction::BackOnly
                                               : OrderConstruction::TwoSided;
  return order;
}

struct OrderHash {
  std::size_t operator()(const std::vector<VarId>& s) const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (VarId v : s) h = (h ^ v) * 0x100000001b3ULL;
    return static_cast<std::size_t>(h);
  }
};

// Scores orders by the operation count of Horner followed by CSE. Results are
// memoized per order; safe to share between threads.
class OrderScorer {
 public:
  OrderScorer(std::span<const Polynomial> polys, CostModel model = {})
      : polys_(polys.begin(), polys.end()), model_(std::move(model)) {
    baseline_ = count_operations(std::span<const Polynomial>(polys_), model_).total();
    variables_ = occurring_variables(polys_);
  }

  std::uint64_t baseline() const { return baseline_; }
  const std::vector<VarId>& variables() const { return variables_; }
  const std::vector<Polynomial>& polynomials() const { return polys_; }

  std::uint64_t operations(const HornerOrder& order) {
    {
      std::lock_guard lock(mutex_);
      if (auto it = memo_.find(order.sequence); it != memo_.end()) return it->second;
    }
    const auto ops = cse_count(apply_scheme(polys_, order), model_).total();
    std::lock_guard lock(mutex_);
    memo_.emplace(order.sequence, ops);
    return ops;
  }

  // Larger is better: baseline operations over achieved operations.
  double score(std::uint64_t ops) const {
    return static_cast<double>(std::max<std::uint64_t>(baseline_, 1)) / static_cast<double>(std::max<std::uint64_t>(ops, 1));
  }

 private:
  std::vector<Polynomial> polys_;
  CostModel model_;
  std::uint64_t baseline_ = 0;
  std::vector<VarId> variables_;
  std::mutex mutex_;
  std::unordered_map<std::vector<VarId>, std::uint64_t, OrderHash> memo_;
};

struct PlayoutResult {
  HornerOrder order;
  std::uint64_t operations = 0;
  double score = 0.0;
};

inline PlayoutResult playout(OrderScorer& scorer, const PartialOrder& partial, Rng& rng) {
  PlayoutResult r;
  r.order = complete_order(partial, scorer.variables(), rng);
  r.operations = scorer.operations(r.order);
  r.score = scorer.score(r.operations);
  return r;
}

struct ScoredOrder {
  HornerOrder order;
  std::uint64_t operations = 0;
};

struct MctsResult {
  std::vector<ScoredOrder> best;  // ascending operations
  std::size_t playouts = 0;
  bool timed_out = false;
};

namespace detail {

// Keeps the `capacity` cheapest distinct orders; earlier finds win ties.
class BestList {
 public:
  explicit BestList(std::size_t capacity) : capacity_(capacity) {}

  void offer(const HornerOrder& order, std::uint64_t ops) {
    for (const auto& e : entries_)
      if (e.order.sequence == order.sequence) return;
    if (entries_.size() == capacity_ && ops >= entries_.back().operations) return;
    auto pos = std::upper_bound(entries_.begin(), entries_.end(), ops,
                                [](std::uint64_t v, const ScoredOrder& e) { return v < e.operations; });
    entries_.insert(pos, {order, ops});
    if (entries_.size() > capacity_) entries_.pop_back();
  }

  void merge(const BestList& other) {
    for (const auto& e : other.entries_) offer(e.order, e.operations);
  }

  const std::vector<ScoredOrder>& entries() const { return entries_; }

 private:
  std::size_t capacity_;
  std::vector<ScoredOrder> entries_;
};

struct TreeJob {
  Direction direction;  // Forward, Backward or ForwardAndBackward
  std::size_t budget;
  std::uint64_t seed;
};

class Tree {
 public:
  Tree(OrderScorer& scorer, const MctsSettings& settings, const TreeJob& job)
      : scorer_(scorer), settings_(settings), job_(job), rng_(job.seed), best_(settings.num_keep) {}

  template <typename Expired>
  void run(Expired&& expired) {
    const std::size_t total = scorer_.variables().size();
    for (std::size_t it = 0; it < job_.budget; ++it) {
      if (expired()) {
        timed_out_ = true;
        return;
      }
      PartialOrder partial;
      path_.clear();
      SearchNode* node = &root_;
      path_.push_back(node);
      while (partial.front.size() + partial.back.size() < total) {
        if (node != &root_ && node->visits == 0) break;
        if (!node->expanded) expand(*node, partial);
        node = &node->children[uct_select(*node, settings_.cp)];
        (node->side == Side::Front ? partial.front : partial.back).push_back(*node->chosen);
        path_.push_back(node);
      }
      const auto result = playout(scorer_, partial, rng_);
      ++playouts_;
      best_.offer(result.order, result.operations);
      for (SearchNode* n : path_) {
        ++n->visits;
        n->score_sum += result.score;
      }
    }
  }

  const BestList& best() const { return best_; }
  std::size_t playouts() const { return playouts_; }
  bool timed_out() const { return timed_out_; }
  const SearchNode& root() const { return root_; }

 private:
  void expand(SearchNode& node, const PartialOrder& partial) {
    node.expanded = true;
    const auto& vars = scorer_.variables();
    std::vector<VarId> open;
    for (VarId v : vars)
      if (std::find(partial.front.begin(), partial.front.end(), v) == partial.front.end() &&
          std::find(partial.back.begin(), partial.back.end(), v) == partial.back.end())
        open.push_back(v);
    for (VarId v : open) {
      switch (job_.direction) {
        case Direction::Backward: node.children.push_back(child(v, Side::Back)); break;
        case Direction::ForwardAndBackward:
          node.children.push_back(child(v, Side::Front));
          if (open.size() > 1) node.children.push_back(child(v, Side::Back));
          break;
        default: node.children.push_back(child(v, Side::Front)); break;
      }
    }
  }

  static SearchNode child(VarId v, Side side) {
    SearchNode n;
    n.chosen = v;
    n.side = side;
    return n;
  }

  OrderScorer& scorer_;
  const MctsSettings& settings_;
  TreeJob job_;
  Rng rng_;
  SearchNode root_;
  std::vector<SearchNode*> path_;
  BestList best_;
  std::size_t playouts_ = 0;
  bool timed_out_ = false;
};

inline std::vector<TreeJob> plan_trees(const MctsSettings& s) {
  std::vector<TreeJob> jobs;
  for (std::size_t r = 0; r < s.num_repeat; ++r) {
    if (s.direction == Direction::ForwardOrBackward) {
      const std::size_t forward = (s.num_expand + 1) / 2;
      jobs.push_back({Direction::Forward, forward, derive_seed(s.seed, 2 * r)});
      if (s.num_expand > forward) jobs.push_back({Direction::Backward, s.num_expand - forward, derive_seed(s.seed, 2 * r + 1)});
    } else {
      jobs.push_back({s.direction, s.num_expand, derive_seed(s.seed, 2 * r)});
    }
  }
  return jobs;
}

}  // namespace detail

// Runs numRepeat independent trees of numExpand iterations each and returns the
// numKeep cheapest orders found.
inline MctsResult mcts_search(std::span<const Polynomial> polys, const MctsSettings& settings,
                              const CostModel& model = {}) {
  settings.validate();
  OrderScorer scorer(polys, model);
  if (scorer.variables().empty()) {
    MctsResult r;
    r.best.push_back({HornerOrder{}, scorer.operations(HornerOrder{})});
    return r;
  }
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto expired = [&] {
    return settings.time_limit_seconds > 0.0 &&
           std::chrono::duration<double>(Clock::now() - start).count() >= settings.time_limit_seconds;
  };
  const auto jobs = detail::plan_trees(settings);
  std::vector<std::unique_ptr<detail::Tree>> trees;
  for (const auto& job : jobs) trees.push_back(std::make_unique<detail::Tree>(scorer, settings, job));

  const unsigned workers = std::min<unsigned>(settings.threads, static_cast<unsigned>(trees.size()));
  if (workers <= 1) {
    for (auto& t : trees) t->run(expired);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < trees.size(); i = next++) trees[i]->run(expired);
      });
  }

  detail::BestList best(settings.num_keep);
  MctsResult result;
  for (const auto& t : trees) {
    best.merge(t->best());
    result.playouts += t->playouts();
    result.timed_out = result.timed_out || t->timed_out();
  }
  result.best = best.entries();
  return result;
}

inline MctsResult mcts_search(const Polynomial& p, const MctsSettings& settings, const CostModel& model = {}) {
  return mcts_search(std::span<const Polynomial>(&p, 1), settings, model);
}

}  // namespace polyopt
