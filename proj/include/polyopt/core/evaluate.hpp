#pragma once

#include "polyopt/core/expression_tree.hpp"
#include "polyopt/core/integer.hpp"
#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/program.hpp"
#include "polyopt/core/random.hpp"

#include <algorithm>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyopt {

inline constexpr std::uint64_t kMersenne31 = 2147483647ULL;

using Residues = std::vector<std::uint64_t>;

namespace detail {

inline std::uint64_t lookup(std::span<const std::uint64_t> assignment, VarId v) {
  if (v >= assignment.size()) throw std::out_of_range("variable " + std::to_string(v) + " missing in assignment");
  return assignment[v];
}

}  // namespace detail

inline std::uint64_t evaluate_mod(const Polynomial& p, std::span<const std::uint64_t> assignment,
                                  std::uint64_t prime) {
  std::uint64_t acc = 0;
  for (const auto& t : p.terms()) {
    std::uint64_t v = modular::reduce(t.coeff, prime);
    for (const auto& f : t.monomial.factors())
      v = modular::mul(v, modular::pow(detail::lookup(assignment, f.var), f.exponent, prime), prime);
    acc = modular::add(acc, v, prime);
  }
  return modular::mul(acc, modular::inverse(modular::reduce(p.denominator(), prime), prime), prime);
}

inline Residues evaluate_mod(std::span<const Polynomial> outputs, std::span<const std::uint64_t> assignment,
                             std::uint64_t prime) {
  Residues r;
  for (const auto& p : outputs) r.push_back(evaluate_mod(p, assignment, prime));
  return r;
}

inline Residues evaluate_mod(const ExpressionTree& tree, std::span<const std::uint64_t> assignment,
                             std::uint64_t prime) {
  std::vector<std::uint64_t> value(tree.size(), 0);
  auto signed_value = [&](NodeRef r) {
    const auto v = value[r.node];
    return r.negated ? (prime - v) % prime : v;
  };
  for (std::uint32_t i = 0; i < tree.size(); ++i) {
    const Node& n = tree.node(i);
    switch (n.kind) {
      case NodeKind::Constant: value[i] = modular::reduce(tree.constant_value(n), prime); break;
      case NodeKind::Variable: value[i] = detail::lookup(assignment, n.payload) % prime; break;
      case NodeKind::Power: value[i] = modular::pow(signed_value(tree.children(n)[0]), n.payload, prime); break;
      case NodeKind::Add: {
        std::uint64_t acc = 0;
        for (const auto& c : tree.children(n)) acc = modular::add(acc, signed_value(c), prime);
        value[i] = acc;
        break;
      }
      case NodeKind::Mul: {
        std::uint64_t acc = 1;
        for (const auto& c : tree.children(n)) acc = modular::mul(acc, signed_value(c), prime);
        value[i] = acc;
        break;
      }
    }
  }
  Residues r;
  for (const auto& root : tree.roots()) r.push_back(signed_value(root));
  return r;
}

inline Residues evaluate_mod(const Program& program, std::span<const std::uint64_t> assignment,
                             std::uint64_t prime) {
  std::vector<std::uint64_t> temps(program.temp_bound(), 0);
  auto operand_value = [&](const Operand& o) {
    const std::uint64_t c = modular::reduce(o.coeff, prime);
    switch (o.kind) {
      case OperandKind::Number: return c;
      case OperandKind::Variable:
        return modular::mul(c, modular::pow(detail::lookup(assignment, o.index), o.power, prime), prime);
      case OperandKind::Temp:
        if (o.index >= temps.size()) throw std::logic_error("undefined temporary");
        return modular::mul(c, modular::pow(temps[o.index], o.power, prime), prime);
    }
    return c;
  };
  for (const auto& ins : program.instructions) {
    std::uint64_t acc = ins.op == OpKind::Add ? 0 : 1 % prime;
    for (const auto& o : ins.operands) {
      const auto v = operand_value(o);
      acc = ins.op == OpKind::Add ? modular::add(acc, v, prime) : modular::mul(acc, v, prime);
    }
    temps[ins.target] = acc;
  }
  Residues r;
  for (const auto& out : program.outputs)
    r.push_back(modular::mul(operand_value(out.value),
                             modular::inverse(modular::reduce(out.denominator, prime), prime), prime));
  return r;
}

namespace detail {

inline std::size_t variable_bound_of(const Polynomial& p) { return p.variable_bound(); }
inline std::size_t variable_bound_of(const Program& p) { return p.variable_bound(); }
inline std::size_t variable_bound_of(const std::vector<Polynomial>& ps) {
  std::size_t b = 0;
  for (const auto& p : ps) b = std::max(b, p.variable_bound());
  return b;
}
inline std::size_t variable_bound_of(const ExpressionTree& t) {
  std::size_t b = 0;
  for (const auto& n : t.nodes())
    if (n.kind == NodeKind::Variable) b = std::max<std::size_t>(b, n.payload + 1);
  return b;
}

inline Residues residues_of(const Polynomial& p, std::span<const std::uint64_t> a, std::uint64_t prime) {
  return {evaluate_mod(p, a, prime)};
}
inline Residues residues_of(const std::vector<Polynomial>& ps, std::span<const std::uint64_t> a,
                            std::uint64_t prime) {
  return evaluate_mod(std::span<const Polynomial>(ps), a, prime);
}
inline Residues residues_of(const Program& p, std::span<const std::uint64_t> a, std::uint64_t prime) {
  return evaluate_mod(p, a, prime);
}
inline Residues residues_of(const ExpressionTree& t, std::span<const std::uint64_t> a, std::uint64_t prime) {
  return evaluate_mod(t, a, prime);
}

}  // namespace detail

// Probabilistic identity test at random points modulo prime.
template <typename A, typename B>
bool equivalent(const A& a, const B& b, int trials = 20, std::uint64_t prime = kMersenne31,
                std::uint64_t seed = 0x5eed) {
  const std::size_t vars = std::max(detail::variable_bound_of(a), detail::variable_bound_of(b));
  Rng rng(seed);
  std::vector<std::uint64_t> point(vars);
  for (int t = 0; t < trials; ++t) {
    for (auto& x : point) x = uniform_index(rng, prime);
    if (detail::residues_of(a, point, prime) != detail::residues_of(b, point, prime)) return false;
  }
  return true;
}

}  // namespace polyopt
