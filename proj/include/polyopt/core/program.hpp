#pragma once

#include "polyopt/core/integer.hpp"
#include "polyopt/core/symbols.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

using TempId = std::uint32_t;

enum class OpKind : std::uint8_t { Add, Mul };
enum class OperandKind : std::uint8_t { Number, Variable, Temp };

// coeff * base^power. A Number operand is just its coeff.
struct Operand {
  OperandKind kind = OperandKind::Number;
  std::uint32_t index = 0;
  std::uint32_t power = 1;
  Integer coeff{1};

  static Operand number(Integer value) { return {OperandKind::Number, 0, 1, std::move(value)}; }
  static Operand variable(VarId v, Integer coeff = 1, std::uint32_t power = 1) {
    return {OperandKind::Variable, v, power, std::move(coeff)};
  }
  static Operand temp(TempId t, Integer coeff = 1, std::uint32_t power = 1) {
    return {OperandKind::Temp, t, power, std::move(coeff)};
  }

  bool is_number() const { return kind == OperandKind::Number; }
  bool is_temp() const { return kind == OperandKind::Temp; }
  bool same_base(const Operand& o) const { return kind == o.kind && index == o.index; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

struct Instruction {
  TempId target = 0;
  OpKind op = OpKind::Add;
  std::vector<Operand> operands;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

struct Output {
  std::string name;
  Operand value;
  Integer denominator{1};

  friend bool operator==(const Output&, const Output&) = default;
};

// Straight-line program: single-operator instructions followed by named outputs.
struct Program {
  std::vector<Instruction> instructions;
  std::vector<Output> outputs;

  // One past the largest temp id defined.
  TempId temp_bound() const {
    TempId bound = 0;
    for (const auto& ins : instructions) bound = std::max<TempId>(bound, ins.target + 1);
    return bound;
  }

  std::size_t variable_bound() const {
    std::size_t bound = 0;
    auto see = [&bound](const Operand& o) {
      if (o.kind == OperandKind::Variable) bound = std::max<std::size_t>(bound, o.index + 1);
    };
    for (const auto& ins : instructions)
      for (const auto& o : ins.operands) see(o);
    for (const auto& out : outputs) see(out.value);
    return bound;
  }

  friend bool operator==(const Program&, const Program&) = default;
};

// Throws std::logic_error when a temporary is read before being defined.
inline void check_def_before_use(const Program& program) {
  std::vector<bool> defined(program.temp_bound(), false);
  auto check = [&defined](const Operand& o) {
    if (o.is_temp() && (o.index >= defined.size() || !defined[o.index]))
      throw std::logic_error("temporary " + std::to_string(o.index) + " used before definition");
  };
  for (const auto& ins : program.instructions) {
    for (const auto& o : ins.operands) check(o);
    defined[ins.target] = true;
  }
  for (const auto& out : program.outputs) check(out.value);
}

}  // namespace polyopt
