#pragma once

#include "polyopt/core/expression_tree.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/symbols.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyopt {

enum class Direction { Forward, Backward, ForwardOrBackward, ForwardAndBackward };

inline std::optional<Direction> parse_direction(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "forward") return Direction::Forward;
  if (lower == "backward") return Direction::Backward;
  if (lower == "forwardorbackward") return Direction::ForwardOrBackward;
  if (lower == "forwardandbackward") return Direction::ForwardAndBackward;
  return std::nullopt;
}

inline std::string to_string(Direction d) {
  switch (d) {
    case Direction::Forward: return "forward";
    case Direction::Backward: return "backward";
    case Direction::ForwardOrBackward: return "forwardorbackward";
    case Direction::ForwardAndBackward: return "forwardandbackward";
  }
  return {};
}

enum class OrderConstruction { FrontOnly, BackOnly, TwoSided };

// Variables outermost first.
struct HornerOrder {
  std::vector<VarId> sequence;
  OrderConstruction construction = OrderConstruction::FrontOnly;

  friend bool operator==(const HornerOrder& a, const HornerOrder& b) { return a.sequence == b.sequence; }
};

inline std::string to_string(const HornerOrder& order, const Symbols& symbols) {
  std::string s;
  for (std::size_t i = 0; i < order.sequence.size(); ++i) s += (i ? "," : "") + symbols.name(order.sequence[i]);
  return s;
}

// Variables occurring in any of the polynomials, ascending id.
inline std::vector<VarId> occurring_variables(std::span<const Polynomial> polys) {
  std::vector<VarId> vars;
  for (const auto& p : polys) {
    auto v = p.variables();
    vars.insert(vars.end(), v.begin(), v.end());
  }
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

// Sorted by the number of terms containing each variable; ties in declaration order.
inline HornerOrder occurrence_order(std::span<const Polynomial> polys, Direction direction) {
  if (direction != Direction::Forward && direction != Direction::Backward)
    throw std::invalid_argument("occurrence order is either forward or backward");
  const auto vars = occurring_variables(polys);
  std::vector<std::size_t> count(vars.empty() ? 0 : vars.back() + 1, 0);
  for (const auto& p : polys)
    for (const auto& t : p.terms())
      for (const auto& f : t.monomial.factors()) ++count[f.var];
  HornerOrder order;
  order.sequence = vars;
  std::stable_sort(order.sequence.begin(), order.sequence.end(),
                   [&count](VarId a, VarId b) { return count[a] > count[b]; });
  if (direction == Direction::Backward) {
    std::reverse(order.sequence.begin(), order.sequence.end());
    order.construction = OrderConstruction::BackOnly;
  }
  return order;
}

inline HornerOrder occurrence_order(const Polynomial& p, Direction direction) {
  return occurrence_order(std::span<const Polynomial>(&p, 1), direction);
}

// The given order verbatim, after checking it is a permutation of the occurring variables.
inline HornerOrder fixed_scheme(std::span<const VarId> sequence, std::span<const Polynomial> polys) {
  std::vector<VarId> sorted(sequence.begin(), sequence.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw std::invalid_argument("duplicate variable in scheme");
  if (sorted != occurring_variables(polys))
    throw std::invalid_argument("scheme is not a permutation of the occurring variables");
  return HornerOrder{{sequence.begin(), sequence.end()}, OrderConstruction::FrontOnly};
}

inline HornerOrder fixed_scheme(const std::vector<std::string>& names, const Symbols& symbols,
                                std::span<const Polynomial> polys) {
  std::vector<VarId> seq;
  for (const auto& n : names) {
    auto id = symbols.find(n);
    if (!id) throw std::invalid_argument("unknown symbol '" + n + "' in scheme");
    seq.push_back(*id);
  }
  return fixed_scheme(seq, polys);
}

namespace detail {

// Builds the nested Horner form. Terms are held as dense exponent rows indexed by
// order position and sorted descending, so every variable split is a contiguous
// run of groups with decreasing exponent.
class HornerBuilder {
 public:
  HornerBuilder(ExpressionTree& tree, std::span<const VarId> order) : tree_(tree), order_(order) {
    leaf_.assign(order.size(), std::nullopt);
  }

  void add_root(const Polynomial& p) {
    if (p.denominator() != 1) throw std::invalid_argument("Horner scheme needs an integer polynomial");
    if (p.is_zero()) {
      tree_.add_root(tree_.constant(0));
      return;
    }
    load(p);
    auto [inner, g] = build(0, rows_.size(), 0);
    tree_.add_root(times_constant(inner, g));
  }

 private:
  void load(const Polynomial& p) {
    const std::size_t width = order_.size();
    std::size_t bound = std::max<std::size_t>(p.variable_bound(), 1);
    for (VarId v : order_) bound = std::max<std::size_t>(bound, v + 1);
    std::vector<int> position(bound, -1);
    for (std::size_t i = 0; i < width; ++i) position[order_[i]] = static_cast<int>(i);
    exps_.assign(p.size() * width, 0);
    coeffs_.clear();
    coeffs_.reserve(p.size());
    std::size_t k = 0;
    for (const auto& t : p.terms()) {
      for (const auto& f : t.monomial.factors()) {
        const int pos = position[f.var];
        if (pos < 0) throw std::invalid_argument("Horner order misses variable " + std::to_string(f.var));
        exps_[k * width + static_cast<std::size_t>(pos)] = f.exponent;
      }
      coeffs_.push_back(t.coeff);
      ++k;
    }
    rows_.resize(p.size());
    std::iota(rows_.begin(), rows_.end(), 0U);
    std::sort(rows_.begin(), rows_.end(), [this, width](std::uint32_t a, std::uint32_t b) {
      const auto* ra = &exps_[a * width];
      const auto* rb = &exps_[b * width];
      for (std::size_t i = 0; i < width; ++i)
        if (ra[i] != rb[i]) return ra[i] > rb[i];
      return false;
    });
  }

  std::uint32_t exponent(std::size_t row, std::size_t level) const {
    return exps_[rows_[row] * order_.size() + level];
  }

  NodeRef variable_leaf(std::size_t level) {
    if (!leaf_[level]) leaf_[level] = tree_.variable(order_[level]);
    return *leaf_[level];
  }

  NodeRef variable_power(std::size_t level, std::uint32_t d) {
    const NodeRef x = variable_leaf(level);
    return d == 1 ? x : tree_.power(x, d);
  }

  // Product that drops a factor of plus or minus one.
  NodeRef times(NodeRef a, NodeRef b) {
    if (tree_.is_unit_constant(a)) return a.negated ? -b : b;
    if (tree_.is_unit_constant(b)) return b.negated ? -a : a;
    return tree_.mul(a, b);
  }

  NodeRef times_constant(NodeRef a, const Integer& c) {
    if (c == 1) return a;
    return times(a, tree_.constant(c));
  }

  // Returns (inner, g) with value = g * inner and g > 0.
  std::pair<NodeRef, Integer> build(std::size_t lo, std::size_t hi, std::size_t level) {
    while (level < order_.size() && exponent(lo, level) == 0) ++level;
    if (level == order_.size()) {
      const Integer& c = coeffs_[rows_[lo]];
      return {c < 0 ? -tree_.constant(1) : tree_.constant(1), abs_value(c)};
    }
    NodeRef acc{};
    Integer h;
    std::size_t start = lo;
    bool first = true;
    while (start < hi) {
      const std::uint32_t pw = exponent(start, level);
      std::size_t end = start + 1;
      while (end < hi && exponent(end, level) == pw) ++end;
      const std::uint32_t next = end < hi ? exponent(end, level) : 0;
      auto [inner, g] = build(start, end, level + 1);
      if (first) {
        acc = inner;
        h = g;
        first = false;
      } else {
        const Integer common = gcd(g, h);
        const NodeRef prev = times_constant(acc, h / common);
        const NodeRef cur = times_constant(inner, g / common);
        acc = tree_.add(prev, cur);
        h = common;
      }
      if (pw > next) acc = times(acc, variable_power(level, pw - next));
      start = end;
    }
    return {acc, h};
  }

  ExpressionTree& tree_;
  std::span<const VarId> order_;
  std::vector<std::optional<NodeRef>> leaf_;
  std::vector<std::uint32_t> exps_;
  std::vector<Integer> coeffs_;
  std::vector<std::uint32_t> rows_;
};

}  // namespace detail

// One root per polynomial, all in one tree over the same order.
inline ExpressionTree apply_scheme(std::span<const Polynomial> polys, const HornerOrder& order) {
  ExpressionTree tree;
  std::size_t terms = 0;
  for (const auto& p : polys) terms += p.size();
  tree.reserve(4 * terms + 8);
  detail::HornerBuilder builder(tree, order.sequence);
  for (const auto& p : polys) builder.add_root(p);
  return tree;
}

inline ExpressionTree apply_scheme(const Polynomial& p, const HornerOrder& order) {
  return apply_scheme(std::span<const Polynomial>(&p, 1), order);
}

}  // namespace polyopt
