#pragma once

#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"

#include <stdexcept>
#include <vector>

namespace polyopt {

// Symbolic value of every output, instructions run in order.
inline std::vector<Polynomial> expand(const Program& program) {
  std::vector<Polynomial> temps(program.temp_bound());
  std::vector<bool> defined(temps.size(), false);
  auto value = [&](const Operand& o) {
    Polynomial base;
    switch (o.kind) {
      case OperandKind::Number: return Polynomial::constant(o.coeff);
      case OperandKind::Variable: base = Polynomial::variable(o.index); break;
      case OperandKind::Temp:
        if (o.index >= temps.size() || !defined[o.index]) throw std::logic_error("undefined temporary");
        base = temps[o.index];
        break;
    }
    return Polynomial::constant(o.coeff) * base.pow(o.power);
  };
  for (const auto& ins : program.instructions) {
    Polynomial acc = Polynomial::constant(ins.op == OpKind::Add ? 0 : 1);
    for (const auto& o : ins.operands) acc = ins.op == OpKind::Add ? acc + value(o) : acc * value(o);
    temps[ins.target] = std::move(acc);
    defined[ins.target] = true;
  }
  std::vector<Polynomial> out;
  for (const auto& o : program.outputs)
    out.push_back(value(o.value) * Polynomial::normalize({Term{Integer(1), Monomial{}}}, o.denominator));
  return out;
}

}  // namespace polyopt
