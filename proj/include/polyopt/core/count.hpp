#pragma once

#include "polyopt/core/expression_tree.hpp"
#include "polyopt/core/op_stats.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"

#include <span>
#include <vector>

namespace polyopt {

inline OpStats count_operations(const Polynomial& p, const CostModel& model = {}) {
  OpStats s;
  if (p.is_zero()) return s;
  for (const auto& t : p.terms()) {
    if (t.monomial.is_constant()) continue;
    std::uint64_t factors = t.monomial.factors().size() + (is_unit(t.coeff) ? 0 : 1);
    s.multiplications += factors - 1;
    for (const auto& f : t.monomial.factors()) s.add_power(f.exponent, model);
  }
  s.additions += p.size() - 1;
  if (p.denominator() != 1) ++s.multiplications;
  return s;
}

// Independent outputs (for example the contents of brackets) are counted separately,
// so the keys never contribute.
inline OpStats count_operations(std::span<const Polynomial> outputs, const CostModel& model = {}) {
  OpStats s;
  for (const auto& p : outputs) s += count_operations(p, model);
  return s;
}

// Every distinct node reachable from a root is evaluated once.
inline OpStats count_operations(const ExpressionTree& tree, const CostModel& model = {}) {
  OpStats s;
  std::vector<bool> seen(tree.size(), false);
  std::vector<std::uint32_t> stack;
  for (const auto& r : tree.roots()) stack.push_back(r.node);
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    if (seen[i]) continue;
    seen[i] = true;
    const Node& n = tree.node(i);
    switch (n.kind) {
      case NodeKind::Add: s.additions += n.count - 1; break;
      case NodeKind::Mul: s.multiplications += n.count - 1; break;
      case NodeKind::Power: s.add_power(n.payload, model); break;
      default: break;
    }
    for (const auto& c : tree.children(n)) stack.push_back(c.node);
  }
  return s;
}

inline OpStats count_operand(const Operand& o, const CostModel& model) {
  OpStats s;
  if (o.is_number()) return s;
  s.add_power(o.power, model);
  if (!is_unit(o.coeff)) ++s.multiplications;
  return s;
}

inline OpStats count_operations(const Program& program, const CostModel& model = {}) {
  OpStats s;
  for (const auto& ins : program.instructions) {
    if (ins.operands.empty()) continue;
    const auto joins = ins.operands.size() - 1;
    if (ins.op == OpKind::Add)
      s.additions += joins;
    else
      s.multiplications += joins;
    for (const auto& o : ins.operands) s += count_operand(o, model);
  }
  for (const auto& out : program.outputs) {
    s += count_operand(out.value, model);
    if (out.denominator != 1) ++s.multiplications;
  }
  return s;
}

}  // namespace polyopt
