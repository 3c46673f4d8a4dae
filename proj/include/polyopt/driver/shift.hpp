#pragma once

#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/core/symbols.hpp"
#include "polyopt/driver/optimize.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polyopt {

// Exact rational num/den with den > 0 in lowest terms.
struct Rational {
  Integer num{0};
  Integer den{1};

  static Rational of(Integer n, Integer d) {
    if (d == 0) throw std::domain_error("zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const Integer g = gcd(n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
    return {std::move(n), std::move(d)};
  }

  friend bool operator==(const Rational&, const Rational&) = default;
  friend bool operator<(const Rational& a, const Rational& b) { return a.num * b.den < b.num * a.den; }
  std::string str() const { return den == 1 ? num.str() : num.str() + "/" + den.str(); }
};

// target -> target + amount * source (source absent: target -> target + amount).
struct ShiftRule {
  VarId target = 0;
  std::optional<VarId> source;
  Rational amount;
};

struct ShiftResult {
  std::vector<ShiftRule> rules;
  Polynomial shifted;
  // Computes the shifted variables from the original ones; one output per variable
  // that was shifted, named after it.
  Program unshift;
};

namespace detail {

inline Polynomial rational_constant(const Rational& r) {
  return Polynomial::normalize({Term{r.num, Monomial{}}}, r.den);
}

inline Polynomial shift_value(const ShiftRule& rule) {
  Polynomial v = Polynomial::variable(rule.target);
  const Polynomial a = rational_constant(rule.amount);
  return v + (rule.source ? a * Polynomial::variable(*rule.source) : a);
}

inline Polynomial apply_shift(const Polynomial& p, const ShiftRule& rule) {
  return p.substitute(rule.target, shift_value(rule));
}

// Candidate shifts suggested by pairs of terms a*xi*R and b*xj*R (or b*R).
inline std::vector<ShiftRule> shift_candidates(const Polynomial& p, const std::vector<VarId>& group,
                                               std::size_t per_pair) {
  std::vector<ShiftRule> out;
  for (VarId xi : group) {
    // rest monomial -> coefficient, over terms linear in xi
    std::map<Monomial, Integer> linear;
    for (const auto& t : p.terms())
      if (t.monomial.exponent(xi) == 1) linear.emplace(t.monomial.without(xi), t.coeff);
    if (linear.empty()) continue;
    auto propose = [&](std::optional<VarId> xj) {
      std::map<Rational, std::size_t> ratios;
      for (const auto& t : p.terms()) {
        Monomial rest;
        if (xj) {
          if (t.monomial.exponent(*xj) != 1) continue;
          rest = t.monomial.without(*xj);
          if (rest.exponent(xi) != 0) continue;
        } else {
          if (t.monomial.exponent(xi) != 0) continue;
          rest = t.monomial;
        }
        if (auto it = linear.find(rest); it != linear.end()) ++ratios[Rational::of(t.coeff, it->second)];
      }
      std::vector<std::pair<Rational, std::size_t>> ranked(ratios.begin(), ratios.end());
      std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
      if (ranked.size() > per_pair) ranked.resize(per_pair);
      for (auto& [r, n] : ranked) {
        // a*xi + b*xj = a*(xi + (b/a)*xj): shifting xi by -(b/a)*xj removes xj.
        out.push_back({xi, xj, Rational::of(-r.num, r.den)});
      }
    };
    for (VarId xj : group)
      if (xj != xi) propose(xj);
    propose(std::nullopt);
  }
  return out;
}

}  // namespace detail

// Applies variable shifts within each group while they make the polynomial shorter.
inline ShiftResult shift_search(const Polynomial& p, const std::vector<std::vector<VarId>>& groups,
                                const Symbols& symbols, std::size_t candidates_per_pair = 4) {
  std::vector<bool> seen(symbols.size(), false);
  for (const auto& g : groups)
    for (VarId v : g) {
      if (v >= symbols.size()) throw std::invalid_argument("unknown variable in shift group");
      if (seen[v]) throw std::invalid_argument("variable in more than one shift group");
      seen[v] = true;
    }
  ShiftResult r;
  r.shifted = p;
  for (;;) {
    std::optional<std::pair<ShiftRule, Polynomial>> best;
    for (const auto& group : groups)
      for (const auto& rule : detail::shift_candidates(r.shifted, group, candidates_per_pair)) {
        Polynomial q = detail::apply_shift(r.shifted, rule);
        const std::size_t limit = best ? best->second.size() : r.shifted.size();
        if (q.size() < limit) best.emplace(rule, std::move(q));
      }
    if (!best) break;
    r.rules.push_back(best->first);
    r.shifted = std::move(best->second);
  }

  // shifted(x') = p(x) with x' obtained by undoing the rules in reverse.
  std::map<VarId, Polynomial> value;
  auto current = [&value](VarId v) {
    auto it = value.find(v);
    return it == value.end() ? Polynomial::variable(v) : it->second;
  };
  for (const auto& rule : r.rules) {
    // After the rule, p is expressed through t' with t = t' + a*s, so t' = t - a*s.
    const Polynomial a = detail::rational_constant(rule.amount);
    Polynomial next = current(rule.target) - (rule.source ? a * current(*rule.source) : a);
    value[rule.target] = std::move(next);
  }
  std::vector<Polynomial> outs;
  std::vector<std::string> names;
  for (auto& [v, poly] : value) {
    outs.push_back(poly);
    names.push_back(symbols.name(v));
  }
  r.unshift = detail::raw_program(outs, names);
  return r;
}

inline std::vector<std::vector<VarId>> single_group(const Symbols& symbols) {
  std::vector<VarId> all(symbols.size());
  for (VarId v = 0; v < all.size(); ++v) all[v] = v;
  return {all};
}

}  // namespace polyopt
