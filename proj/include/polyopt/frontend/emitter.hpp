#pragma once

#include "polyopt/core/program.hpp"
#include "polyopt/core/symbols.hpp"

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

enum class Dialect { Plain, C, Fortran };

struct EmitSettings {
  Dialect dialect = Dialect::Plain;
  // Empty: scalar temporaries Z1_, Z2_, ...; otherwise array elements name(1), ...
  std::string temp_array;
  std::string temp_prefix = "Z";
  int indent = 0;
  int line_width = 72;
  bool double_precision_suffix = false;
  // Powers above this exponent are emitted as a call in C.
  std::uint32_t power_call_threshold = 3;
  std::string power_function = "pow";

  static EmitSettings for_dialect(Dialect d) {
    EmitSettings s;
    s.dialect = d;
    if (d == Dialect::Fortran) s.indent = 6;
    return s;
  }

  void validate() const {
    if (line_width < 40) throw std::invalid_argument("line width must be at least 40");
    if (indent < 0 || indent + 20 > line_width) throw std::invalid_argument("indent does not fit the line width");
  }
};

class Emitter {
 public:
  Emitter(const Symbols& symbols, EmitSettings settings) : symbols_(symbols), settings_(std::move(settings)) {
    settings_.validate();
  }

  std::string temp_name(TempId t) const {
    const auto k = std::to_string(t + 1);
    if (settings_.temp_array.empty()) return settings_.temp_prefix + k + "_";
    if (settings_.dialect == Dialect::C) return settings_.temp_array + "[" + k + "]";
    return settings_.temp_array + "(" + k + ")";
  }

  std::string emit(const Program& program) const {
    std::string out;
    const bool inline_last = inlines_last_instruction(program);
    for (std::size_t i = 0; i < program.instructions.size(); ++i) {
      const auto& ins = program.instructions[i];
      if (inline_last && i + 1 == program.instructions.size()) {
        out += statement(program.outputs.front().name, rhs(ins), program.outputs.front().denominator);
      } else {
        out += statement(temp_name(ins.target), rhs(ins), 1);
      }
    }
    if (!inline_last)
      for (const auto& o : program.outputs) out += statement(o.name, operand_text(o.value), o.denominator);
    return out;
  }

  // Instructions in reverse order as substitutions "id Zk_ = rhs;".
  std::string emit_debug_substitutions(const Program& program) const {
    std::string out;
    for (auto it = program.instructions.rbegin(); it != program.instructions.rend(); ++it)
      out += "id " + temp_name(it->target) + " = " + rhs(*it) + ";\n";
    return out;
  }

  std::string comment(const std::string& text) const {
    switch (settings_.dialect) {
      case Dialect::C: return std::string(settings_.indent, ' ') + "/* " + text + " */\n";
      case Dialect::Fortran: return "* " + text + "\n";
      case Dialect::Plain: break;
    }
    return "# " + text + "\n";
  }

  std::string rhs(const Instruction& ins) const {
    if (ins.operands.empty()) return ins.op == OpKind::Add ? "0" : "1";
    return ins.op == OpKind::Add ? sum_text(ins.operands) : product_text(ins.operands);
  }

 private:
  static bool inlines_last_instruction(const Program& p) {
    if (p.outputs.size() != 1 || p.instructions.empty()) return false;
    const auto& v = p.outputs.front().value;
    return v.is_temp() && v.coeff == 1 && v.power == 1 && v.index == p.instructions.back().target;
  }

  std::string number_text(const Integer& magnitude) const {
    std::string s = magnitude.str();
    switch (settings_.dialect) {
      case Dialect::Fortran:
        if (settings_.double_precision_suffix) s += ".D0";
        break;
      case Dialect::C:
        if (magnitude > 2147483647) s += ".";
        break;
      case Dialect::Plain: break;
    }
    return s;
  }

  std::string base_text(const Operand& o) const {
    return o.kind == OperandKind::Variable ? symbols_.name(o.index) : temp_name(o.index);
  }

  std::string power_text(const Operand& o) const {
    const std::string b = base_text(o);
    if (o.power == 1) return b;
    const auto e = std::to_string(o.power);
    switch (settings_.dialect) {
      case Dialect::Plain: return b + "^" + e;
      case Dialect::Fortran: return b + "**" + e;
      case Dialect::C:
        if (o.power <= settings_.power_call_threshold) {
          std::string s = b;
          for (std::uint32_t i = 1; i < o.power; ++i) s += "*" + b;
          return s;
        }
        return settings_.power_function + "(" + b + "," + e + ")";
    }
    return b;
  }

  // Unsigned magnitude of a term, e.g. "2*x^2".
  std::string magnitude_text(const Operand& o) const {
    const Integer m = abs_value(o.coeff);
    if (o.is_number()) return number_text(m);
    if (m == 1) return power_text(o);
    return number_text(m) + "*" + power_text(o);
  }

  std::string operand_text(const Operand& o) const {
    const std::string m = magnitude_text(o);
    return o.coeff < 0 ? "-" + m : m;
  }

  std::string sum_text(const std::vector<Operand>& ops) const {
    std::string s;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const bool neg = ops[i].coeff < 0;
      if (i == 0)
        s += neg ? "-" : "";
      else
        s += neg ? " - " : " + ";
      s += magnitude_text(ops[i]);
    }
    return s;
  }

  std::string product_text(const std::vector<Operand>& ops) const {
    bool negative = false;
    std::vector<std::string> factors;
    Integer number = 1;
    bool have_number = false;
    for (const auto& o : ops) {
      if (o.coeff < 0) negative = !negative;
      if (o.is_number()) {
        number *= abs_value(o.coeff);
        have_number = true;
      }
    }
    if (have_number && (number != 1 || ops.size() == 1)) factors.push_back(number_text(number));
    for (const auto& o : ops) {
      if (o.is_number()) continue;
      if (!is_unit(o.coeff)) factors.push_back(number_text(abs_value(o.coeff)));
      factors.push_back(power_text(o));
    }
    if (factors.empty()) factors.push_back(number_text(1));
    std::string s = negative ? "-" : "";
    for (std::size_t i = 0; i < factors.size(); ++i) s += (i ? "*" : "") + factors[i];
    return s;
  }

  std::string denominator_text(const Integer& d) const {
    std::string s = d.str();
    if (settings_.dialect == Dialect::C) s += ".";
    if (settings_.dialect == Dialect::Fortran) s += settings_.double_precision_suffix ? ".D0" : ".";
    return s;
  }

  std::string statement(const std::string& lhs, std::string value, const Integer& denominator) const {
    if (denominator != 1) value = "(" + value + ")/" + denominator_text(denominator);
    const std::string pad(static_cast<std::size_t>(settings_.indent), ' ');
    switch (settings_.dialect) {
      case Dialect::Plain: return pad + lhs + " = " + value + ";\n";
      case Dialect::C: return pad + lhs + " = " + value + ";\n";
      case Dialect::Fortran: return fortran_lines(lhs + "=" + value);
    }
    return {};
  }

  // Fixed-form continuation: "     &" in columns 1-6, no line beyond line_width.
  std::string fortran_lines(const std::string& stmt) const {
    const std::string first_pad(static_cast<std::size_t>(settings_.indent), ' ');
    const std::string cont_pad = "     &";
    std::string out;
    std::size_t pos = 0;
    bool first = true;
    while (pos < stmt.size()) {
      const std::string& pad = first ? first_pad : cont_pad;
      const std::size_t room = static_cast<std::size_t>(settings_.line_width) - pad.size();
      std::size_t take = std::min(room, stmt.size() - pos);
      if (pos + take < stmt.size()) {
        // Prefer breaking before an operator.
        for (std::size_t k = take; k > room / 2; --k) {
          const char c = stmt[pos + k];
          if (c == '+' || c == '-' || c == '*' || c == ' ') {
            if (c == '*' && stmt[pos + k - 1] == '*') continue;
            if (c == '*' && pos + k + 1 < stmt.size() && stmt[pos + k + 1] == '*') continue;
            take = k;
            break;
          }
        }
      }
      out += pad + stmt.substr(pos, take) + "\n";
      pos += take;
      first = false;
    }
    return out;
  }

  const Symbols& symbols_;
  EmitSettings settings_;
};

inline std::string emit(const Program& program, const Symbols& symbols, const EmitSettings& settings = {}) {
  return Emitter(symbols, settings).emit(program);
}

inline std::string emit_debug_substitutions(const Program& program, const Symbols& symbols,
                                            const EmitSettings& settings = {}) {
  return Emitter(symbols, settings).emit_debug_substitutions(program);
}

}  // namespace polyopt
