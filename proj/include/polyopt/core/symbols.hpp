#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace polyopt {

using VarId = std::uint32_t;

// Declared variables of one problem. Ids are dense and follow declaration order.
class Symbols {
 public:
  Symbols() = default;

  explicit Symbols(const std::vector<std::string>& names) {
    for (const auto& n : names) add(n);
  }

  VarId add(const std::string& name) {
    if (name.empty()) throw std::invalid_argument("empty symbol name");
    if (index_.count(name) != 0) throw std::invalid_argument("duplicate symbol '" + name + "'");
    const auto id = static_cast<VarId>(names_.size());
    names_.push_back(name);
    index_.emplace(name, id);
    return id;
  }

  std::optional<VarId> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  VarId at(std::string_view name) const {
    if (auto id = find(name)) return *id;
    throw std::out_of_range("undeclared symbol '" + std::string(name) + "'");
  }

  const std::string& name(VarId id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, VarId> index_;
};

}  // namespace polyopt
