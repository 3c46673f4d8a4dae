#pragma once

#include "polyopt/alloc/recycle.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/core/random.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace polyopt::gen {

struct PolyShape {
  std::uint32_t variables = 3;
  std::size_t terms = 10;
  std::int64_t max_coeff = 9;
  std::uint32_t max_exponent = 3;
  // Chance that a variable appears in a term, in percent.
  std::uint32_t density = 50;
};

inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  return lo + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::uint64_t>(hi - lo + 1)));
}

// Random polynomial with up to shape.terms distinct terms and nonzero coefficients.
inline Polynomial random_polynomial(Rng& rng, const PolyShape& shape) {
  std::vector<Term> terms;
  for (std::size_t k = 0; k < shape.terms; ++k) {
    std::vector<Factor> factors;
    for (VarId v = 0; v < shape.variables; ++v) {
      if (uniform_index(rng, 100) >= shape.density) continue;
      factors.push_back({v, static_cast<std::uint32_t>(uniform_int(rng, 1, shape.max_exponent))});
    }
    std::int64_t c = 0;
    while (c == 0) c = uniform_int(rng, -shape.max_coeff, shape.max_coeff);
    terms.push_back({Integer(c), Monomial(std::move(factors))});
  }
  return Polynomial::normalize(std::move(terms));
}

inline Symbols numbered_symbols(std::size_t n) {
  Symbols s;
  for (std::size_t i = 0; i < n; ++i) s.add("x" + std::to_string(i + 1));
  return s;
}

// Independent slot checker: simulates the program and records which value each slot holds.
// Returns an empty string when every read sees the value the writer intended.
inline std::string slot_conflict(const Program& original, const Program& recycled) {
  if (original.instructions.size() != recycled.instructions.size()) return "instruction count changed";
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> holder(recycled.temp_bound(), none);
  std::vector<std::size_t> producer(original.temp_bound(), none);
  for (std::size_t i = 0; i < original.instructions.size(); ++i) {
    const auto& a = original.instructions[i];
    const auto& b = recycled.instructions[i];
    if (a.operands.size() != b.operands.size()) return "operand count changed at " + std::to_string(i);
    for (std::size_t k = 0; k < a.operands.size(); ++k) {
      if (a.operands[k].is_temp() != b.operands[k].is_temp()) return "operand kind changed";
      if (!a.operands[k].is_temp()) continue;
      if (holder[b.operands[k].index] != producer[a.operands[k].index])
        return "slot " + std::to_string(b.operands[k].index) + " overwritten before read at " + std::to_string(i);
    }
    producer[a.target] = i;
    holder[b.target] = i;
  }
  for (std::size_t k = 0; k < original.outputs.size(); ++k) {
    const auto& a = original.outputs[k].value;
    const auto& b = recycled.outputs[k].value;
    if (a.is_temp() && holder[b.index] != producer[a.index]) return "output " + std::to_string(k) + " clobbered";
  }
  return {};
}

// Largest number of temporaries alive at once, a value being alive from its definition
// through its last read; a definition may reuse the slot of an operand read for the last time.
inline std::size_t max_liveness(const Program& program) {
  std::size_t best = 0;
  const auto ranges = live_ranges(program);
  const std::size_t n = program.instructions.size();
  for (std::size_t i = 0; i < n; ++i) {
    // Values live across the point just after instruction i has been executed.
    std::size_t live = 0;
    for (const auto& r : ranges)
      if (r.first_def <= i && r.last_use > i) ++live;
    // The value defined at i counts even if never read again.
    bool defined_dead = false;
    for (const auto& r : ranges)
      if (r.first_def == i && r.last_use == i) defined_dead = true;
    best = std::max(best, live + (defined_dead ? 1 : 0));
  }
  return best;
}

}  // namespace polyopt::gen
