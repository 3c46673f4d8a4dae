#pragma once

#include "polyopt/core/count.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/core/program_ops.hpp"
#include "polyopt/simplify/merge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace polyopt {

enum class SubexprKind : std::uint8_t { Power, Product, ConstMul, ConstAdd, Sum, Difference };

// Operands are identified by base_key(): variables positive, temporaries negative.
// Product, Sum and Difference keep first < second; Difference stands for first - second.
// ConstMul holds |c|, ConstAdd the signed constant of x + c.
struct SubexprKey {
  SubexprKind kind = SubexprKind::Power;
  std::int64_t first = 0;
  std::int64_t second = 0;
  std::uint32_t exponent = 0;
  Integer coeff = 0;

  friend bool operator<(const SubexprKey& a, const SubexprKey& b) {
    if (std::tie(a.kind, a.first, a.second, a.exponent) != std::tie(b.kind, b.first, b.second, b.exponent))
      return std::tie(a.kind, a.first, a.second, a.exponent) < std::tie(b.kind, b.first, b.second, b.exponent);
    return a.coeff < b.coeff;
  }
  friend bool operator==(const SubexprKey&, const SubexprKey&) = default;
};

struct GreedySettings {
  double max_percentage = 5.0;
  std::size_t min_number = 10;
  double time_limit_seconds = 0.0;

  void validate() const {
    if (!(max_percentage > 0.0 && max_percentage <= 100.0))
      throw std::invalid_argument("greedy percentage must be in (0, 100]");
    if (min_number < 1) throw std::invalid_argument("greedy minimum must be at least 1");
    if (time_limit_seconds < 0.0) throw std::invalid_argument("greedy time limit must not be negative");
  }
};

namespace detail {

// Instructions addressed by temp id; removed ones are left empty and flagged dead.
struct Workspace {
  std::vector<Instruction> code;
  std::vector<bool> dead;
  std::vector<Output> outputs;

  explicit Workspace(const Program& program) {
    Program dense = tidy(program);
    code = std::move(dense.instructions);
    dead.assign(code.size(), false);
    outputs = std::move(dense.outputs);
  }

  TempId size() const { return static_cast<TempId>(code.size()); }

  TempId append(OpKind op, std::vector<Operand> operands) {
    const TempId t = size();
    code.push_back({t, op, std::move(operands)});
    dead.push_back(false);
    return t;
  }

  void kill(TempId t) {
    dead[t] = true;
    code[t].operands.clear();
  }

  Program program() const {
    Program p;
    for (TempId t = 0; t < size(); ++t)
      if (!dead[t]) p.instructions.push_back(code[t]);
    p.outputs = outputs;
    return tidy(std::move(p));
  }

  // Redirects references to aliased temporaries: alias[t] = (u, negated).
  void rename(const std::unordered_map<TempId, std::pair<TempId, bool>>& alias) {
    if (alias.empty()) return;
    auto fix = [&alias](Operand& o) {
      if (!o.is_temp()) return;
      // Aliases may chain within one batch.
      for (auto it = alias.find(o.index); it != alias.end(); it = alias.find(o.index)) {
        o.index = it->second.first;
        if (it->second.second && o.power % 2 == 1) o.coeff = -o.coeff;
      }
    };
    for (TempId t = 0; t < size(); ++t)
      if (!dead[t])
        for (auto& o : code[t].operands) fix(o);
    for (auto& out : outputs) fix(out.value);
  }
};

struct Candidate {
  SubexprKey key;
  std::size_t count = 0;
  std::vector<TempId> equations;

  std::size_t improve() const { return count - 1; }
};

// Hash-friendly counting key; coefficients are interned.
struct RawKey {
  std::uint8_t kind;
  std::int64_t first, second, extra;
  friend bool operator==(const RawKey&, const RawKey&) = default;
};

struct RawKeyHash {
  std::size_t operator()(const RawKey& k) const {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ k.kind;
    for (std::int64_t v : {k.first, k.second, k.extra}) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6U) + (h >> 2U);
      h *= 0x100000001b3ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

class PatternCounter {
 public:
  void scan(const Instruction& ins) {
    eqn_ = ins.target;
    const auto& ops = ins.operands;
    const Operand* number = nullptr;
    for (const auto& o : ops)
      if (o.is_number()) number = &o;
    if (ins.op == OpKind::Mul) {
      for (std::size_t i = 0; i < ops.size(); ++i) {
        const Operand& a = ops[i];
        if (a.is_number()) continue;
        if (a.power > 1) add({0, base_key(a), 0, a.power}, 1);
        if (number && !is_unit(number->coeff) && a.power == 1)
          add({2, base_key(a), 0, intern(abs_value(number->coeff))}, 1);
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
          const Operand& b = ops[j];
          if (b.is_number() || b.power != a.power || a.same_base(b)) continue;
          const std::int64_t ka = base_key(a), kb = base_key(b);
          const std::int64_t lo = std::min(ka, kb), hi = std::max(ka, kb);
          add({1, lo, hi, 0}, a.power > 1 ? 2 : 1);
        }
      }
      return;
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const Operand& a = ops[i];
      if (a.is_number() || a.power != 1) continue;
      if (!is_unit(a.coeff)) add({2, base_key(a), 0, intern(abs_value(a.coeff))}, 1);
      if (number && is_unit(a.coeff)) add({3, base_key(a), 0, intern(a.coeff * number->coeff)}, 1);
      for (std::size_t j = i + 1; j < ops.size(); ++j) {
        const Operand& b = ops[j];
        if (b.is_number() || b.power != 1 || a.same_base(b)) continue;
        if (abs_value(a.coeff) != abs_value(b.coeff)) continue;
        const std::int64_t ka = base_key(a), kb = base_key(b);
        const std::int64_t lo = std::min(ka, kb), hi = std::max(ka, kb);
        const std::uint8_t kind = a.coeff == b.coeff ? 4 : 5;
        add({kind, lo, hi, 0}, is_unit(a.coeff) ? 1 : 2);
      }
    }
  }

  // Candidates with count >= 2, in key order.
  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    for (const auto& [raw, entry] : table_) {
      if (entry.count < 2) continue;
      Candidate c;
      c.key.kind = static_cast<SubexprKind>(raw.kind);
      c.key.first = raw.first;
      c.key.second = raw.second;
      if (raw.kind == 0)
        c.key.exponent = static_cast<std::uint32_t>(raw.extra);
      else if (raw.kind == 2 || raw.kind == 3)
        c.key.coeff = coefficients_[static_cast<std::size_t>(raw.extra)];
      c.count = entry.count;
      c.equations = entry.equations;
      out.push_back(std::move(c));
    }
    std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.key < b.key; });
    return out;
  }

  std::map<SubexprKey, std::size_t> counts() const {
    std::map<SubexprKey, std::size_t> out;
    for (const auto& [raw, entry] : table_) {
      SubexprKey k{static_cast<SubexprKind>(raw.kind), raw.first, raw.second, 0, 0};
      if (raw.kind == 0) k.exponent = static_cast<std::uint32_t>(raw.extra);
      if (raw.kind == 2 || raw.kind == 3) k.coeff = coefficients_[static_cast<std::size_t>(raw.extra)];
      out[k] = entry.count;
    }
    return out;
  }

 private:
  struct Entry {
    std::size_t count = 0;
    std::vector<TempId> equations;
  };

  std::int64_t intern(const Integer& c) {
    auto [it, inserted] = coefficient_ids_.try_emplace(c, static_cast<std::int64_t>(coefficients_.size()));
    if (inserted) coefficients_.push_back(c);
    return it->second;
  }

  void add(const RawKey& key, std::size_t weight) {
    auto& e = table_[key];
    e.count += weight;
    if (e.equations.empty() || e.equations.back() != eqn_) e.equations.push_back(eqn_);
  }

  TempId eqn_ = 0;
  std::unordered_map<RawKey, Entry, RawKeyHash> table_;
  std::map<Integer, std::int64_t> coefficient_ids_;
  std::vector<Integer> coefficients_;
};

inline int sign_int(const Integer& c) { return c < 0 ? -1 : 1; }

inline std::optional<std::size_t> find_base(const std::vector<Operand>& ops, std::int64_t key,
                                            std::optional<std::uint32_t> power = 1) {
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (!ops[i].is_number() && base_key(ops[i]) == key && (!power || ops[i].power == *power)) return i;
  return std::nullopt;
}

inline void erase_two(std::vector<Operand>& ops, std::size_t i, std::size_t j) {
  if (i < j) std::swap(i, j);
  ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(i));
  ops.erase(ops.begin() + static_cast<std::ptrdiff_t>(j));
}

// Rewrites one instruction to use the new temporary z if the pattern is still there.
inline bool substitute(Instruction& ins, const SubexprKey& key, TempId z) {
  auto& ops = ins.operands;
  switch (key.kind) {
    case SubexprKind::Power: {
      if (ins.op != OpKind::Mul) return false;
      bool any = false;
      for (auto& o : ops)
        if (!o.is_number() && base_key(o) == key.first && o.power % key.exponent == 0) {
          o = Operand::temp(z, o.coeff, o.power / key.exponent);
          any = true;
        }
      return any;
    }
    case SubexprKind::Product: {
      if (ins.op != OpKind::Mul) return false;
      const auto a = find_base(ops, key.first, std::nullopt);
      const auto b = find_base(ops, key.second, std::nullopt);
      if (!a || !b || ops[*a].power != ops[*b].power) return false;
      Operand zt = Operand::temp(z, ops[*a].coeff * ops[*b].coeff, ops[*a].power);
      erase_two(ops, *a, *b);
      ops.push_back(std::move(zt));
      return true;
    }
    case SubexprKind::ConstMul: {
      if (ins.op == OpKind::Add) {
        for (auto& o : ops)
          if (!o.is_number() && base_key(o) == key.first && o.power == 1 && abs_value(o.coeff) == key.coeff) {
            o = Operand::temp(z, sign_int(o.coeff));
            return true;
          }
        return false;
      }
      std::optional<std::size_t> num;
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].is_number() && abs_value(ops[i].coeff) == key.coeff) num = i;
      const auto x = find_base(ops, key.first);
      if (!num || !x) return false;
      Operand zt = Operand::temp(z, sign_int(ops[*num].coeff) * ops[*x].coeff);
      erase_two(ops, *num, *x);
      ops.push_back(std::move(zt));
      return true;
    }
    case SubexprKind::ConstAdd: {
      if (ins.op != OpKind::Add) return false;
      std::optional<std::size_t> num;
      for (std::size_t i = 0; i < ops.size(); ++i)
        if (ops[i].is_number()) num = i;
      const auto x = find_base(ops, key.first);
      if (!num || !x || !is_unit(ops[*x].coeff)) return false;
      const Integer s = ops[*x].coeff;
      if (ops[*num].coeff != key.coeff * s) return false;
      erase_two(ops, *num, *x);
      ops.push_back(Operand::temp(z, s));
      return true;
    }
    case SubexprKind::Sum:
    case SubexprKind::Difference: {
      if (ins.op != OpKind::Add) return false;
      const auto a = find_base(ops, key.first);
      const auto b = find_base(ops, key.second);
      if (!a || !b) return false;
      const Integer& ca = ops[*a].coeff;
      const Integer& cb = ops[*b].coeff;
      if (key.kind == SubexprKind::Sum ? ca != cb : ca != -cb) return false;
      Operand zt = Operand::temp(z, ca);
      erase_two(ops, *a, *b);
      ops.push_back(std::move(zt));
      return true;
    }
  }
  return false;
}

inline Instruction definition(const SubexprKey& key, TempId z) {
  switch (key.kind) {
    case SubexprKind::Power: return {z, OpKind::Mul, {operand_from_key(key.first, 1, key.exponent)}};
    case SubexprKind::Product:
      return {z, OpKind::Mul, {operand_from_key(key.first), operand_from_key(key.second)}};
    case SubexprKind::ConstMul: return {z, OpKind::Add, {operand_from_key(key.first, key.coeff)}};
    case SubexprKind::ConstAdd: return {z, OpKind::Add, {operand_from_key(key.first), Operand::number(key.coeff)}};
    case SubexprKind::Sum: return {z, OpKind::Add, {operand_from_key(key.first), operand_from_key(key.second)}};
    case SubexprKind::Difference:
      return {z, OpKind::Add, {operand_from_key(key.first), operand_from_key(key.second, -1)}};
  }
  return {};
}

// Applies one pattern in the listed equations. Equations reduced to a plain reference
// to the new temporary are removed and their uses redirected.
inline bool apply_pattern(Workspace& ws, const SubexprKey& key, const std::vector<TempId>& equations) {
  const TempId z = ws.size();
  std::vector<TempId> touched;
  for (TempId e : equations) {
    if (e >= z || ws.dead[e]) continue;
    if (!touched.empty() && std::find(touched.begin(), touched.end(), e) != touched.end()) continue;
    if (substitute(ws.code[e], key, z)) touched.push_back(e);
  }
  if (touched.empty()) return false;
  Instruction def = definition(key, z);
  ws.append(def.op, std::move(def.operands));
  std::unordered_map<TempId, std::pair<TempId, bool>> alias;
  for (TempId e : touched) {
    const auto& ops = ws.code[e].operands;
    if (ops.size() == 1 && ops[0].is_temp() && ops[0].power == 1 && is_unit(ops[0].coeff)) {
      alias[e] = {ops[0].index, ops[0].coeff < 0};
      ws.kill(e);
    }
  }
  ws.rename(alias);
  return true;
}

inline std::vector<Candidate> find_candidates(const Workspace& ws) {
  PatternCounter counter;
  for (TempId t = 0; t < ws.size(); ++t)
    if (!ws.dead[t]) counter.scan(ws.code[t]);
  return counter.candidates();
}

// One round of substitutions; returns the improvement of the last one applied.
inline std::optional<std::size_t> greedy_step(Workspace& ws, const GreedySettings& settings) {
  auto candidates = find_candidates(ws);
  if (candidates.empty()) return std::nullopt;
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.count > b.count; });
  std::size_t todo = std::max<std::size_t>(
      settings.min_number,
      static_cast<std::size_t>(std::ceil(static_cast<double>(candidates.size()) * settings.max_percentage / 100.0)));
  if (candidates.front().improve() <= 1) todo = candidates.size();
  todo = std::min(todo, candidates.size());
  std::vector<TempId> added;
  std::size_t last_improve = 0;
  for (std::size_t k = 0; k < todo; ++k) {
    auto& c = candidates[k];
    last_improve = c.improve();
    c.equations.insert(c.equations.end(), added.begin(), added.end());
    const TempId before = ws.size();
    if (apply_pattern(ws, c.key, c.equations)) added.push_back(before);
  }
  return last_improve;
}

// Factors the most frequent operand out of sums, looking one level into products used
// only by that sum. Acts when the operand occurs in at least two terms and in more
// than `threshold`.
inline void factor_sums(Workspace& ws, std::size_t threshold) {
  Program snapshot;
  for (TempId t = 0; t < ws.size(); ++t)
    if (!ws.dead[t]) snapshot.instructions.push_back(ws.code[t]);
  snapshot.outputs = ws.outputs;
  const auto parents = reference_weights(snapshot);
  auto sub_product = [&](const Operand& o) -> std::optional<TempId> {
    if (!o.is_temp() || o.power != 1 || o.index >= parents.size() || parents[o.index] != 1) return std::nullopt;
    if (ws.dead[o.index] || ws.code[o.index].op != OpKind::Mul) return std::nullopt;
    return o.index;
  };

  std::map<std::int64_t, std::size_t> tally;
  for (TempId i = 0; i < ws.size(); ++i) {
    while (!ws.dead[i] && ws.code[i].op == OpKind::Add) {
      tally.clear();
      for (const auto& o : ws.code[i].operands) {
        if (o.is_number()) continue;
        if (o.power == 1) ++tally[base_key(o)];
        if (auto s = sub_product(o)) {
          std::vector<std::int64_t> seen;
          for (const auto& u : ws.code[*s].operands) {
            if (u.is_number() || u.power != 1) continue;
            const auto k = base_key(u);
            if (std::find(seen.begin(), seen.end(), k) != seen.end()) continue;
            seen.push_back(k);
            ++tally[k];
          }
        }
      }
      std::int64_t best = 0;
      std::size_t best_count = 0;
      for (const auto& [k, n] : tally)
        if (n > best_count) {
          best = k;
          best_count = n;
        }
      if (best_count < 2 || best_count <= threshold) break;

      std::vector<Operand> quotient;
      std::vector<Operand> rest;
      for (const auto& o : ws.code[i].operands) {
        if (!o.is_number() && o.power == 1 && base_key(o) == best) {
          quotient.push_back(Operand::number(o.coeff));
          continue;
        }
        const auto s = sub_product(o);
        const auto at = s ? find_base(ws.code[*s].operands, best) : std::nullopt;
        if (!at) {
          rest.push_back(o);
          continue;
        }
        auto& sops = ws.code[*s].operands;
        const Integer c = o.coeff * sops[*at].coeff;
        sops.erase(sops.begin() + static_cast<std::ptrdiff_t>(*at));
        if (sops.empty()) {
          quotient.push_back(Operand::number(c));
          ws.kill(*s);
        } else if (sops.size() == 1 && (sops[0].is_number() || sops[0].power == 1)) {
          Operand w = sops[0];
          w.coeff *= c;
          quotient.push_back(std::move(w));
          ws.kill(*s);
        } else {
          quotient.push_back(Operand::temp(*s, c));
        }
      }
      Instruction q{0, OpKind::Add, std::move(quotient)};
      fold_numbers(q);
      const TempId zq = ws.append(OpKind::Add, std::move(q.operands));
      std::vector<Operand> product{operand_from_key(best), Operand::temp(zq)};
      if (rest.empty()) {
        ws.code[i].op = OpKind::Mul;
        ws.code[i].operands = std::move(product);
      } else {
        const TempId zp = ws.append(OpKind::Mul, std::move(product));
        rest.push_back(Operand::temp(zp));
        ws.code[i].operands = std::move(rest);
      }
    }
  }
}

}  // namespace detail

// Occurrence counts of the small patterns x^n, x*y, c*x, x+c, x+y and x-y.
inline std::map<SubexprKey, std::size_t> count_small_subexprs(const Program& program) {
  detail::PatternCounter counter;
  for (const auto& ins : program.instructions) counter.scan(ins);
  return counter.counts();
}

// One greedy round. The flag is false when no pattern occurs twice.
inline std::pair<Program, bool> greedy_round(const Program& program, const GreedySettings& settings = {}) {
  settings.validate();
  detail::Workspace ws(program);
  const auto applied = detail::greedy_step(ws, settings);
  if (!applied) return {tidy(program), false};
  return {ws.program(), true};
}

inline Program partial_factor(const Program& program, std::size_t threshold = 0) {
  detail::Workspace ws(program);
  detail::factor_sums(ws, threshold);
  return ws.program();
}

// Greedy rounds alternated with partial factorization until a round creates no new
// instruction or the time limit passes. Returns the cheapest program seen.
inline Program optimize_program(const Program& program, const GreedySettings& settings = {},
                                const CostModel& model = {}) {
  settings.validate();
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();
  auto expired = [&] {
    if (settings.time_limit_seconds <= 0.0) return false;
    return std::chrono::duration<double>(Clock::now() - start).count() >= settings.time_limit_seconds;
  };
  detail::Workspace ws(program);
  Program best = ws.program();
  auto best_total = count_operations(best, model).total();
  while (!expired()) {
    const TempId before = ws.size();
    const auto last = detail::greedy_step(ws, settings);
    detail::factor_sums(ws, last.value_or(0));
    if (ws.size() == before) break;
    Program current = ws.program();
    const auto total = count_operations(current, model).total();
    if (total < best_total) {
      best = std::move(current);
      best_total = total;
    }
  }
  return best;
}

}  // namespace polyopt
