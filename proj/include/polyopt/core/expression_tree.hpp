#pragma once

#include "polyopt/core/integer.hpp"
#include "polyopt/core/symbols.hpp"

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyopt {

enum class NodeKind : std::uint8_t { Constant, Variable, Power, Add, Mul };

// Signed reference to a node; negation lives on edges, never in a node.
struct NodeRef {
  std::uint32_t node = 0;
  bool negated = false;

  NodeRef operator-() const { return {node, !negated}; }
  friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

struct Node {
  NodeKind kind = NodeKind::Constant;
  // Constant: index into the constant table (values are non-negative).
  // Variable: variable id. Power: exponent (>= 2). Add/Mul: unused.
  std::uint32_t payload = 0;
  std::uint32_t first = 0;  // first child edge
  std::uint32_t count = 0;  // number of child edges
};

// Operator DAG. Children are always created before their parents, so node
// indices are a topological order.
class ExpressionTree {
 public:
  NodeRef constant(const Integer& value) {
    const bool neg = value < 0;
    constants_.push_back(neg ? Integer(-value) : value);
    nodes_.push_back({NodeKind::Constant, static_cast<std::uint32_t>(constants_.size() - 1), 0, 0});
    return {last(), neg};
  }

  NodeRef variable(VarId v) {
    nodes_.push_back({NodeKind::Variable, v, 0, 0});
    return {last(), false};
  }

  NodeRef power(NodeRef base, std::uint32_t exponent) {
    if (exponent < 2) throw std::invalid_argument("power exponent must be at least 2");
    const auto first = static_cast<std::uint32_t>(edges_.size());
    edges_.push_back(base);
    nodes_.push_back({NodeKind::Power, exponent, first, 1});
    return {last(), false};
  }

  NodeRef op(NodeKind kind, std::span<const NodeRef> children) {
    if (kind != NodeKind::Add && kind != NodeKind::Mul) throw std::invalid_argument("not an operator kind");
    if (children.size() < 2) throw std::invalid_argument("operator needs at least two operands");
    const auto first = static_cast<std::uint32_t>(edges_.size());
    edges_.insert(edges_.end(), children.begin(), children.end());
    nodes_.push_back({kind, 0, first, static_cast<std::uint32_t>(children.size())});
    return {last(), false};
  }

  NodeRef add(NodeRef a, NodeRef b) {
    const NodeRef c[2] = {a, b};
    return op(NodeKind::Add, c);
  }

  NodeRef mul(NodeRef a, NodeRef b) {
    const NodeRef c[2] = {a, b};
    return op(NodeKind::Mul, c);
  }

  void add_root(NodeRef r) { roots_.push_back(r); }

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(std::uint32_t i) const { return nodes_[i]; }
  const std::vector<NodeRef>& roots() const { return roots_; }
  const Integer& constant_value(const Node& n) const { return constants_[n.payload]; }

  std::span<const NodeRef> children(const Node& n) const {
    return {edges_.data() + n.first, n.count};
  }

  bool is_unit_constant(NodeRef r) const {
    const Node& n = nodes_[r.node];
    return n.kind == NodeKind::Constant && constants_[n.payload] == 1;
  }

  std::size_t size() const { return nodes_.size(); }

  void reserve(std::size_t nodes) {
    nodes_.reserve(nodes);
    edges_.reserve(2 * nodes);
  }

 private:
  std::uint32_t last() const { return static_cast<std::uint32_t>(nodes_.size() - 1); }

  std::vector<Node> nodes_;
  std::vector<NodeRef> edges_;
  std::vector<Integer> constants_;
  std::vector<NodeRef> roots_;
};

}  // namespace polyopt
