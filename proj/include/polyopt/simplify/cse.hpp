#pragma once

#include "polyopt/core/count.hpp"
#include "polyopt/core/expression_tree.hpp"
#include "polyopt/core/op_stats.hpp"
#include "polyopt/core/program.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace polyopt {

inline std::vector<std::string> default_output_names(std::size_t n) {
  if (n == 1) return {"F"};
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back("F" + std::to_string(i + 1));
  return names;
}

namespace detail {

// Value numbering of tree nodes. Structurally equal subtrees (up to operand order of
// the commutative operators) receive the same class. Leaves are classes too.
class ValueNumbering {
 public:
  enum class ClassKind : std::uint8_t { Constant, Variable, Computed };

  struct ClassInfo {
    ClassKind kind;
    std::uint32_t payload;  // constant index, variable id or temp id
  };

  explicit ValueNumbering(bool share) : share_(share) {}

  // Numbers every node of the tree; returns the signed class ref per node.
  template <typename OnNewComputed>
  std::vector<std::uint64_t> run(const ExpressionTree& tree, OnNewComputed&& on_new) {
    std::vector<std::uint64_t> ref(tree.size());
    std::vector<std::uint64_t> kids;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      const Node& n = tree.node(i);
      switch (n.kind) {
        case NodeKind::Constant: ref[i] = signed_ref(constant_class(tree.constant_value(n)), false); break;
        case NodeKind::Variable: ref[i] = signed_ref(variable_class(n.payload), false); break;
        case NodeKind::Power:
        case NodeKind::Add:
        case NodeKind::Mul: {
          kids.clear();
          for (const auto& c : tree.children(n)) kids.push_back(ref[c.node] ^ (c.negated ? 1U : 0U));
          if (n.kind != NodeKind::Power) std::sort(kids.begin(), kids.end());
          const std::uint32_t exponent = n.kind == NodeKind::Power ? n.payload : 0;
          ref[i] = signed_ref(computed_class(n.kind, exponent, kids, on_new), false);
          break;
        }
      }
    }
    return ref;
  }

  static std::uint64_t signed_ref(std::uint32_t cls, bool neg) { return (std::uint64_t{cls} << 1U) | (neg ? 1U : 0U); }
  static std::uint32_t class_of(std::uint64_t r) { return static_cast<std::uint32_t>(r >> 1U); }
  static bool negated(std::uint64_t r) { return (r & 1U) != 0; }

  const ClassInfo& info(std::uint32_t cls) const { return classes_[cls]; }
  const Integer& constant(std::uint32_t index) const { return constants_[index]; }

 private:
  struct BinaryKey {
    std::uint64_t a, b;
    std::uint32_t kind_exp;
    friend bool operator==(const BinaryKey&, const BinaryKey&) = default;
  };
  struct BinaryKeyHash {
    std::size_t operator()(const BinaryKey& k) const {
      std::uint64_t h = k.a * 0x9e3779b97f4a7c15ULL;
      h ^= (k.b + 0x632be59bd9b4e019ULL + (h << 6U) + (h >> 2U)) * 0xbf58476d1ce4e5b9ULL;
      h ^= k.kind_exp + (h << 6U) + (h >> 2U);
      return static_cast<std::size_t>(h ^ (h >> 29U));
    }
  };

  std::uint32_t constant_class(const Integer& v) {
    auto [it, inserted] = constant_ids_.try_emplace(v, 0);
    if (inserted) {
      constants_.push_back(v);
      it->second = new_class(ClassKind::Constant, static_cast<std::uint32_t>(constants_.size() - 1));
    }
    return it->second;
  }

  std::uint32_t variable_class(std::uint32_t v) {
    if (v >= variable_ids_.size()) variable_ids_.resize(v + 1, kNone);
    if (variable_ids_[v] == kNone) variable_ids_[v] = new_class(ClassKind::Variable, v);
    return variable_ids_[v];
  }

  template <typename OnNewComputed>
  std::uint32_t computed_class(NodeKind kind, std::uint32_t exponent, const std::vector<std::uint64_t>& kids,
                               OnNewComputed&& on_new) {
    auto make = [&]() {
      const auto temp = next_temp_++;
      const auto cls = new_class(ClassKind::Computed, temp);
      on_new(temp, kind, exponent, kids);
      return cls;
    };
    if (!share_) return make();
    const std::uint32_t kind_exp = (exponent << 3U) | static_cast<std::uint32_t>(kind);
    if (kids.size() <= 2) {
      BinaryKey key{kids[0], kids.size() == 2 ? kids[1] : ~std::uint64_t{0}, kind_exp};
      auto it = binary_.find(key);
      if (it != binary_.end()) return it->second;
      const auto cls = make();
      binary_.emplace(key, cls);
      return cls;
    }
    std::vector<std::uint64_t> key(kids);
    key.push_back(kind_exp);
    auto it = nary_.find(key);
    if (it != nary_.end()) return it->second;
    const auto cls = make();
    nary_.emplace(std::move(key), cls);
    return cls;
  }

  std::uint32_t new_class(ClassKind kind, std::uint32_t payload) {
    classes_.push_back({kind, payload});
    return static_cast<std::uint32_t>(classes_.size() - 1);
  }

  static constexpr std::uint32_t kNone = ~std::uint32_t{0};
  bool share_;
  std::uint32_t next_temp_ = 0;
  std::vector<ClassInfo> classes_;
  std::vector<Integer> constants_;
  std::map<Integer, std::uint32_t> constant_ids_;
  std::vector<std::uint32_t> variable_ids_;
  std::unordered_map<BinaryKey, std::uint32_t, BinaryKeyHash> binary_;
  std::map<std::vector<std::uint64_t>, std::uint32_t> nary_;
};

// Translates the tree to instructions: one per node, or one per distinct node when
// sharing. Only nodes reachable from the roots are kept.
inline Program tree_to_program(const ExpressionTree& tree, bool share, std::vector<std::string> names) {
  if (names.empty()) names = default_output_names(tree.roots().size());
  if (names.size() != tree.roots().size()) throw std::invalid_argument("one name per root expected");
  // Restrict to reachable nodes so dead parts of the tree do not produce code.
  std::vector<bool> live(tree.size(), false);
  for (const auto& r : tree.roots()) live[r.node] = true;
  for (std::uint32_t i = tree.size(); i-- > 0;)
    if (live[i])
      for (const auto& c : tree.children(tree.node(i))) live[c.node] = true;

  ValueNumbering vn(share);
  Program program;
  auto operand_of = [&vn](std::uint64_t r) {
    const auto& info = vn.info(ValueNumbering::class_of(r));
    const Integer sign = ValueNumbering::negated(r) ? -1 : 1;
    switch (info.kind) {
      case ValueNumbering::ClassKind::Constant: return Operand::number(sign * vn.constant(info.payload));
      case ValueNumbering::ClassKind::Variable: return Operand::variable(info.payload, sign);
      case ValueNumbering::ClassKind::Computed: break;
    }
    return Operand::temp(info.payload, sign);
  };
  std::vector<std::uint64_t> ref(tree.size(), 0);
  std::vector<std::uint64_t> kids;
  // Mirror ValueNumbering::run but skip dead nodes.
  ExpressionTree pruned;
  {
    std::vector<NodeRef> remap(tree.size());
    std::vector<NodeRef> children;
    for (std::uint32_t i = 0; i < tree.size(); ++i) {
      if (!live[i]) continue;
      const Node& n = tree.node(i);
      switch (n.kind) {
        case NodeKind::Constant: remap[i] = pruned.constant(tree.constant_value(n)); break;
        case NodeKind::Variable: remap[i] = pruned.variable(n.payload); break;
        case NodeKind::Power: {
          const NodeRef c = tree.children(n)[0];
          const NodeRef base = remap[c.node];
          remap[i] = pruned.power(c.negated ? -base : base, n.payload);
          break;
        }
        case NodeKind::Add:
        case NodeKind::Mul:
          children.clear();
          for (const auto& c : tree.children(n)) children.push_back(c.negated ? -remap[c.node] : remap[c.node]);
          remap[i] = pruned.op(n.kind, children);
          break;
      }
    }
    for (const auto& r : tree.roots()) pruned.add_root(r.negated ? -remap[r.node] : remap[r.node]);
  }
  const auto refs = vn.run(pruned, [&](std::uint32_t temp, NodeKind kind, std::uint32_t exponent,
                                       const std::vector<std::uint64_t>& children) {
    Instruction ins;
    ins.target = temp;
    if (kind == NodeKind::Power) {
      ins.op = OpKind::Mul;
      Operand base = operand_of(children[0]);
      // An odd power keeps the sign of its base; an even one drops it.
      if (exponent % 2 == 0) base.coeff = abs_value(base.coeff);
      base.power = exponent;
      if (base.is_number()) {
        base.coeff = boost::multiprecision::pow(base.coeff, exponent);
        base.power = 1;
      }
      ins.operands.push_back(std::move(base));
    } else {
      ins.op = kind == NodeKind::Add ? OpKind::Add : OpKind::Mul;
      for (auto c : children) ins.operands.push_back(operand_of(c));
    }
    program.instructions.push_back(std::move(ins));
  });
  for (std::size_t i = 0; i < pruned.roots().size(); ++i) {
    const NodeRef r = pruned.roots()[i];
    program.outputs.push_back({names[i], operand_of(refs[r.node] ^ (r.negated ? 1U : 0U)), 1});
  }
  return program;
}

}  // namespace detail

// Common subexpression elimination: one instruction per distinct operator node.
inline Program cse(const ExpressionTree& tree, std::vector<std::string> names = {}) {
  return detail::tree_to_program(tree, true, std::move(names));
}

// One instruction per operator node, nothing shared.
inline Program to_program(const ExpressionTree& tree, std::vector<std::string> names = {}) {
  return detail::tree_to_program(tree, false, std::move(names));
}

// Operation count of cse(tree) without building the program.
inline OpStats cse_count(const ExpressionTree& tree, const CostModel& model = {}) {
  OpStats s;
  detail::ValueNumbering vn(true);
  vn.run(tree, [&](std::uint32_t, NodeKind kind, std::uint32_t exponent, const std::vector<std::uint64_t>& kids) {
    switch (kind) {
      case NodeKind::Add: s.additions += kids.size() - 1; break;
      case NodeKind::Mul: s.multiplications += kids.size() - 1; break;
      case NodeKind::Power: s.add_power(exponent, model); break;
      default: break;
    }
  });
  return s;
}

}  // namespace polyopt
