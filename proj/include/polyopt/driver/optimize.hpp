#pragma once

#include "polyopt/alloc/recycle.hpp"
#include "polyopt/core/count.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/driver/settings.hpp"
#include "polyopt/horner/scheme.hpp"
#include "polyopt/mcts/search.hpp"
#include "polyopt/simplify/cse.hpp"
#include "polyopt/simplify/greedy.hpp"
#include "polyopt/simplify/merge.hpp"

#include <chrono>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

struct Bracket {
  std::string key;  // also the output name
  Polynomial content;
};

// Contents of an expression grouped by opaque keys; only the contents are optimized.
struct BracketedExpression {
  std::vector<Bracket> brackets;
};

// Groups the terms of p by the exponent of `outside`. Keys are name + "_" + exponent.
inline BracketedExpression bracket_by(const Polynomial& p, VarId outside, const std::string& name) {
  std::map<std::uint32_t, std::vector<Term>> groups;
  for (const auto& t : p.terms()) groups[t.monomial.exponent(outside)].push_back({t.coeff, t.monomial.without(outside)});
  BracketedExpression b;
  for (auto& [e, terms] : groups)
    b.brackets.push_back({name + "_" + std::to_string(e), Polynomial::normalize(std::move(terms), p.denominator())});
  return b;
}

struct OptimizeResult {
  Program program;
  OpStats before;
  OpStats after;
  HornerOrder order;
  bool timed_out = false;
  // Final count for every Horner scheme tried, in the order tried.
  std::vector<ScoredOrder> tried;
};

namespace detail {

inline Polynomial numerator(const Polynomial& p) { return Polynomial::normalize(p.terms(), 1); }

// Term-by-term evaluation: one product per non-trivial term, one sum per output.
inline Program raw_program(std::span<const Polynomial> polys, const std::vector<std::string>& names) {
  Program prog;
  TempId next = 0;
  for (std::size_t k = 0; k < polys.size(); ++k) {
    const Polynomial& p = polys[k];
    std::vector<Operand> terms;
    for (const auto& t : p.terms()) {
      const auto& factors = t.monomial.factors();
      if (factors.empty()) {
        terms.push_back(Operand::number(t.coeff));
        continue;
      }
      if (factors.size() == 1) {
        terms.push_back(Operand::variable(factors[0].var, t.coeff, factors[0].exponent));
        continue;
      }
      Instruction ins{next, OpKind::Mul, {}};
      if (!is_unit(t.coeff)) ins.operands.push_back(Operand::number(abs_value(t.coeff)));
      for (const auto& f : factors) ins.operands.push_back(Operand::variable(f.var, 1, f.exponent));
      prog.instructions.push_back(std::move(ins));
      terms.push_back(Operand::temp(next++, sign_of(t.coeff)));
    }
    Operand value = Operand::number(0);
    if (terms.size() == 1) {
      value = terms.front();
    } else if (terms.size() > 1) {
      prog.instructions.push_back({next, OpKind::Add, std::move(terms)});
      value = Operand::temp(next++);
    }
    prog.outputs.push_back({names[k], std::move(value), p.denominator()});
  }
  return prog;
}

inline Program run_method(const ExpressionTree& tree, Method method, GreedySettings greedy,
                          const std::vector<std::string>& names, const CostModel& model) {
  switch (method) {
    case Method::None: return merge_operators(to_program(tree, names), true);
    case Method::Cse: return merge_operators(cse(tree, names), true);
    case Method::Greedy:
    case Method::CseGreedy: {
      greedy.time_limit_seconds /= 2.0;
      Program p = method == Method::Greedy ? to_program(tree, names) : cse(tree, names);
      p = merge_operators(p, false);
      p = optimize_program(p, greedy, model);
      p = merge_operators(p, true);
      p = optimize_program(p, greedy, model);
      return merge_operators(p, true);
    }
  }
  return {};
}

inline std::vector<HornerOrder> candidate_orders(std::span<const Polynomial> polys, const OptimizerSettings& s,
                                                 bool& timed_out) {
  if (s.scheme) return {fixed_scheme(*s.scheme, polys)};
  std::vector<HornerOrder> orders;
  if (s.horner == HornerMethod::Occurrence) {
    auto add = [&](Direction d) {
      HornerOrder o = occurrence_order(polys, d);
      for (const auto& e : orders)
        if (e == o) return;
      orders.push_back(std::move(o));
    };
    if (s.direction != Direction::Backward) add(Direction::Forward);
    if (s.direction != Direction::Forward) add(Direction::Backward);
    return orders;
  }
  MctsSettings m = s.mcts;
  m.seed = s.seed;
  m.direction = s.direction;
  const auto found = mcts_search(polys, m, s.cost);
  timed_out = found.timed_out;
  for (const auto& e : found.best) orders.push_back(e.order);
  return orders;
}

}  // namespace detail

// Optimizes several outputs as one program; names label the outputs.
inline OptimizeResult optimize(std::span<const Polynomial> polys, const std::vector<std::string>& names,
                               const OptimizerSettings& settings) {
  settings.validate();
  if (polys.empty()) throw std::invalid_argument("nothing to optimize");
  if (names.size() != polys.size()) throw std::invalid_argument("one name per output expected");
  OptimizeResult r;
  r.before = count_operations(polys, settings.cost);
  if (settings.level == Level::O0) {
    r.program = detail::raw_program(polys, names);
    r.after = count_operations(r.program, settings.cost);
    return r;
  }
  std::vector<Polynomial> numerators;
  for (const auto& p : polys) numerators.push_back(detail::numerator(p));
  const auto orders = detail::candidate_orders(numerators, settings, r.timed_out);

  GreedySettings per_scheme = settings.greedy;
  per_scheme.time_limit_seconds /= static_cast<double>(orders.size());
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  bool have = false;
  std::uint64_t best_total = 0;
  for (const auto& order : orders) {
    const ExpressionTree tree = apply_scheme(numerators, order);
    Program p = detail::run_method(tree, settings.method, per_scheme, names, settings.cost);
    for (std::size_t k = 0; k < polys.size(); ++k) p.outputs[k].denominator = polys[k].denominator();
    const auto total = count_operations(p, settings.cost).total();
    r.tried.push_back({order, total});
    if (!have || total < best_total) {
      have = true;
      best_total = total;
      r.program = std::move(p);
      r.order = order;
    }
  }
  if (settings.greedy.time_limit_seconds > 0.0 &&
      std::chrono::duration<double>(Clock::now() - start).count() >= settings.greedy.time_limit_seconds)
    r.timed_out = true;
  r.program = recycle(dfs_schedule(r.program));
  r.after = count_operations(r.program, settings.cost);
  return r;
}

inline OptimizeResult optimize(const Polynomial& p, const OptimizerSettings& settings, const std::string& name = "F") {
  return optimize(std::span<const Polynomial>(&p, 1), {name}, settings);
}

inline OptimizeResult optimize(const BracketedExpression& b, const OptimizerSettings& settings) {
  std::vector<Polynomial> contents;
  std::vector<std::string> keys;
  for (const auto& br : b.brackets) {
    if (std::find(keys.begin(), keys.end(), br.key) != keys.end())
      throw std::invalid_argument("duplicate bracket key '" + br.key + "'");
    contents.push_back(br.content);
    keys.push_back(br.key);
  }
  return optimize(contents, keys, settings);
}

}  // namespace polyopt
