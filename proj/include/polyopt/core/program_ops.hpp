#pragma once

#include "polyopt/core/program.hpp"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace polyopt {

// Signed id of an operand base: variables positive, temporaries negative, numbers 0.
inline std::int64_t base_key(const Operand& o) {
  switch (o.kind) {
    case OperandKind::Variable: return static_cast<std::int64_t>(o.index) + 1;
    case OperandKind::Temp: return -static_cast<std::int64_t>(o.index) - 1;
    case OperandKind::Number: break;
  }
  return 0;
}

inline Operand operand_from_key(std::int64_t key, Integer coeff = 1, std::uint32_t power = 1) {
  if (key > 0) return Operand::variable(static_cast<VarId>(key - 1), std::move(coeff), power);
  return Operand::temp(static_cast<TempId>(-key - 1), std::move(coeff), power);
}

// Combines the number operands of an instruction into at most one. In a product the
// non-unit coefficients join the number too, and a lone sign moves onto the first factor.
inline void fold_numbers(Instruction& ins) {
  if (ins.op == OpKind::Add) {
    Integer acc = 0;
    bool had_number = false;
    std::erase_if(ins.operands, [&](const Operand& o) {
      if (!o.is_number()) return o.coeff == 0;
      acc += o.coeff;
      had_number = true;
      return true;
    });
    if (had_number && acc != 0) ins.operands.push_back(Operand::number(acc));
    return;
  }
  Integer acc = 1;
  std::erase_if(ins.operands, [&](Operand& o) {
    acc *= o.coeff;
    if (o.is_number()) return true;
    o.coeff = 1;
    return false;
  });
  if (acc == 0) {
    ins.operands.assign(1, Operand::number(0));
  } else if (ins.operands.empty()) {
    if (acc != 1) ins.operands.push_back(Operand::number(acc));
  } else if (acc == -1) {
    ins.operands.front().coeff = -1;
  } else if (acc != 1) {
    ins.operands.insert(ins.operands.begin(), Operand::number(acc));
  }
}

// o with every reference to a temporary replaced by its value when the value is a
// plain operand.
inline Operand substitute_alias(const Operand& o, const Operand& value) {
  // o = c * t^p with t = value = v * b^q
  Operand r = value;
  r.coeff = o.coeff * boost::multiprecision::pow(value.coeff, o.power);
  if (value.is_number()) {
    r.power = 1;
  } else {
    r.power = value.power * o.power;
  }
  return r;
}

// Replaces temporaries defined as a single plain operand (for example Z = -x, Z = 5,
// an empty sum or product) by that operand everywhere. Requires unique targets.
inline void inline_aliases(Program& program) {
  const TempId bound = program.temp_bound();
  std::vector<std::optional<Operand>> alias(bound);
  auto resolve = [&alias](Operand& o) {
    if (o.is_temp() && o.index < alias.size() && alias[o.index]) o = substitute_alias(o, *alias[o.index]);
  };
  std::vector<Instruction> kept;
  kept.reserve(program.instructions.size());
  for (auto& ins : program.instructions) {
    for (auto& o : ins.operands) resolve(o);
    fold_numbers(ins);
    if (ins.operands.empty()) {
      alias[ins.target] = Operand::number(ins.op == OpKind::Add ? 0 : 1);
      continue;
    }
    if (ins.operands.size() == 1) {
      const Operand& only = ins.operands.front();
      if (only.is_number() || (only.power == 1 && is_unit(only.coeff))) {
        alias[ins.target] = only;
        continue;
      }
    }
    kept.push_back(std::move(ins));
  }
  program.instructions = std::move(kept);
  for (auto& out : program.outputs) resolve(out.value);
}

// Depth-first post-order from the outputs, operands visited in index order.
// Unreachable instructions are dropped; temporaries are renumbered by position.
inline Program schedule_postorder(const Program& program) {
  const TempId bound = program.temp_bound();
  std::vector<int> def(bound, -1);
  for (std::size_t i = 0; i < program.instructions.size(); ++i) {
    const auto t = program.instructions[i].target;
    if (def[t] != -1) throw std::logic_error("temporary defined twice");
    def[t] = static_cast<int>(i);
  }
  enum : std::uint8_t { kNew, kActive, kDone };
  std::vector<std::uint8_t> state(bound, kNew);
  std::vector<TempId> renum(bound, 0);
  Program out;
  out.instructions.reserve(program.instructions.size());
  // Explicit stack of (temp, next operand index).
  std::vector<std::pair<TempId, std::size_t>> stack;
  auto visit = [&](TempId root) {
    if (root >= bound || def[root] < 0) throw std::logic_error("temporary used but not defined");
    if (state[root] == kDone) return;
    stack.emplace_back(root, 0);
    state[root] = kActive;
    while (!stack.empty()) {
      auto& [t, next] = stack.back();
      const auto& ops = program.instructions[static_cast<std::size_t>(def[t])].operands;
      if (next < ops.size()) {
        const Operand& o = ops[next++];
        if (!o.is_temp()) continue;
        if (o.index >= bound || def[o.index] < 0) throw std::logic_error("temporary used but not defined");
        if (state[o.index] == kActive) throw std::logic_error("cycle in program");
        if (state[o.index] == kNew) {
          state[o.index] = kActive;
          stack.emplace_back(o.index, 0);
        }
        continue;
      }
      state[t] = kDone;
      renum[t] = static_cast<TempId>(out.instructions.size());
      out.instructions.push_back(program.instructions[static_cast<std::size_t>(def[t])]);
      stack.pop_back();
    }
  };
  for (const auto& o : program.outputs)
    if (o.value.is_temp()) visit(o.value.index);
  for (auto& ins : out.instructions) {
    ins.target = renum[ins.target];
    for (auto& o : ins.operands)
      if (o.is_temp()) o.index = renum[o.index];
  }
  out.outputs = program.outputs;
  for (auto& o : out.outputs)
    if (o.value.is_temp()) o.value.index = renum[o.value.index];
  return out;
}

// Aliases inlined, then scheduled and densely renumbered.
inline Program tidy(Program program) {
  inline_aliases(program);
  return schedule_postorder(program);
}

}  // namespace polyopt
