#pragma once

#include "polyopt/core/expression_tree.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/core/program_ops.hpp"

#include <optional>
#include <vector>

namespace polyopt {

// Collapses same-operator parent/child pairs when the child has no other parent.
// Negation of an absorbed sum is distributed over its terms; negation of an absorbed
// product lands on its first factor.
inline ExpressionTree merge_operators(const ExpressionTree& tree) {
  std::vector<std::uint32_t> parents(tree.size(), 0);
  for (std::uint32_t i = 0; i < tree.size(); ++i)
    for (const auto& c : tree.children(tree.node(i))) ++parents[c.node];
  for (const auto& r : tree.roots()) parents[r.node] += 2;

  ExpressionTree out;
  out.reserve(tree.size());
  std::vector<NodeRef> remap(tree.size());
  std::vector<std::vector<NodeRef>> spliced(tree.size());
  std::vector<NodeRef> kids;
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    switch (n.kind) {
      case NodeKind::Constant: remap[i] = out.constant(tree.constant_value(n)); break;
      case NodeKind::Variable: remap[i] = out.variable(n.payload); break;
      case NodeKind::Power: {
        const NodeRef c = tree.children(n)[0];
        remap[i] = out.power(c.negated ? -remap[c.node] : remap[c.node], n.payload);
        break;
      }
      case NodeKind::Add:
      case NodeKind::Mul: {
        kids.clear();
        for (const auto& c : tree.children(n)) {
          const Node& child = tree.node(c.node);
          if (child.kind == n.kind && parents[c.node] == 1) {
            const auto& inner = spliced[c.node];
            for (std::size_t k = 0; k < inner.size(); ++k) {
              const bool flip = c.negated && (n.kind == NodeKind::Add || k == 0);
              kids.push_back(flip ? -inner[k] : inner[k]);
            }
          } else {
            kids.push_back(c.negated ? -remap[c.node] : remap[c.node]);
          }
        }
        if (parents[i] == 1) spliced[i] = kids;
        remap[i] = out.op(n.kind, kids);
        break;
      }
    }
  }
  for (const auto& r : tree.roots()) out.add_root(r.negated ? -remap[r.node] : remap[r.node]);
  // Nodes that were spliced still exist as unreachable duplicates; rebuild compactly.
  ExpressionTree compact;
  compact.reserve(out.size());
  std::vector<bool> live(out.size(), false);
  for (const auto& r : out.roots()) live[r.node] = true;
  for (std::uint32_t i = out.size(); i-- > 0;)
    if (live[i])
      for (const auto& c : out.children(out.node(i))) live[c.node] = true;
  std::vector<NodeRef> again(out.size());
  for (std::uint32_t i = 0; i < out.size(); ++i) {
    if (!live[i]) continue;
    const Node& n = out.node(i);
    switch (n.kind) {
      case NodeKind::Constant: again[i] = compact.constant(out.constant_value(n)); break;
      case NodeKind::Variable: again[i] = compact.variable(n.payload); break;
      case NodeKind::Power:
      case NodeKind::Add:
      case NodeKind::Mul: {
        kids.clear();
        for (const auto& c : out.children(n)) kids.push_back(c.negated ? -again[c.node] : again[c.node]);
        again[i] = n.kind == NodeKind::Power ? compact.power(kids[0], n.payload) : compact.op(n.kind, kids);
        break;
      }
    }
  }
  for (const auto& r : out.roots()) compact.add_root(r.negated ? -again[r.node] : again[r.node]);
  return compact;
}

namespace detail {

// References to each temporary, weighted so that only a plain single use scores 1.
inline std::vector<std::uint32_t> reference_weights(const Program& program) {
  std::vector<std::uint32_t> refs(program.temp_bound(), 0);
  auto see = [&refs](const Operand& o, std::uint32_t extra) {
    if (!o.is_temp()) return;
    refs[o.index] += 1 + extra + (is_unit(o.coeff) ? 0 : 1) + (o.power > 1 ? 1 : 0);
  };
  for (const auto& ins : program.instructions)
    for (const auto& o : ins.operands) see(o, 0);
  for (const auto& out : program.outputs) see(out.value, 2);
  return refs;
}

}  // namespace detail

// Program form of operator merging. A temporary used exactly once, plainly, by an
// instruction with the same operator is spliced into it. With move_coeff, a sum
// term referring to a single-use product that carries a number takes that number
// as its coefficient (and the product disappears when one factor is left).
inline Program merge_operators(const Program& program, bool move_coeff) {
  const auto refs = detail::reference_weights(program);
  const TempId bound = program.temp_bound();
  std::vector<int> def(bound, -1);
  for (std::size_t i = 0; i < program.instructions.size(); ++i)
    def[program.instructions[i].target] = static_cast<int>(i);

  // Final operand lists, built in definition order so children are ready first.
  std::vector<std::vector<Operand>> merged(program.instructions.size());
  std::vector<bool> absorbed(program.instructions.size(), false);
  auto single_use_child = [&](const Operand& o) -> std::optional<std::size_t> {
    if (!o.is_temp() || o.index >= bound || def[o.index] < 0 || refs[o.index] != 1) return std::nullopt;
    return static_cast<std::size_t>(def[o.index]);
  };

  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const auto& ins = program.instructions[i];
    std::vector<Operand> ops;
    ops.reserve(ins.operands.size());
    for (const auto& o : ins.operands) {
      const auto child = single_use_child(o);
      if (!child) {
        ops.push_back(o);
        continue;
      }
      const auto& cins = program.instructions[*child];
      auto& cops = merged[*child];
      const bool negative = o.coeff < 0;
      if (cins.op == ins.op) {
        absorbed[*child] = true;
        if (ins.op == OpKind::Add) {
          for (auto c : cops) {
            if (negative) c.coeff = -c.coeff;
            ops.push_back(std::move(c));
          }
        } else if (cops.empty()) {
          ops.push_back(Operand::number(negative ? -1 : 1));
        } else {
          for (std::size_t k = 0; k < cops.size(); ++k) {
            Operand c = cops[k];
            if (negative && k == 0) c.coeff = -c.coeff;
            ops.push_back(std::move(c));
          }
        }
        continue;
      }
      if (move_coeff && ins.op == OpKind::Add && cins.op == OpKind::Mul) {
        Integer number = 1;
        bool has_number = false;
        for (const auto& c : cops)
          if (c.is_number()) {
            number *= c.coeff;
            has_number = true;
          }
        if (has_number) {
          std::erase_if(cops, [](const Operand& c) { return c.is_number(); });
          Integer factor = negative ? Integer(-number) : number;
          if (cops.empty()) {
            absorbed[*child] = true;
            ops.push_back(Operand::number(factor));
            continue;
          }
          if (cops.size() == 1 && cops.front().power == 1) {
            absorbed[*child] = true;
            Operand c = cops.front();
            c.coeff *= factor;
            ops.push_back(std::move(c));
            continue;
          }
          for (auto& c : cops)
            if (c.coeff < 0) {
              c.coeff = -c.coeff;
              factor = -factor;
            }
          Operand moved = o;
          moved.coeff = factor;
          ops.push_back(std::move(moved));
          continue;
        }
      }
      ops.push_back(o);
    }
    Instruction tmp{ins.target, ins.op, std::move(ops)};
    fold_numbers(tmp);
    merged[i] = std::move(tmp.operands);
  }

  Program out;
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    if (absorbed[i]) continue;
    const auto& ins = program.instructions[i];
    out.instructions.push_back({ins.target, ins.op, std::move(merged[i])});
  }
  out.outputs = program.outputs;
  inline_aliases(out);
  return out;
}

}  // namespace polyopt
