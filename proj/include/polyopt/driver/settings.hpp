#pragma once

#include "polyopt/core/op_stats.hpp"
#include "polyopt/horner/scheme.hpp"
#include "polyopt/mcts/search.hpp"
#include "polyopt/simplify/greedy.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyopt {

enum class Level { O0, O1, O2, O3 };
enum class HornerMethod { Occurrence, Mcts };
enum class Method { None, Cse, Greedy, CseGreedy };

inline std::optional<Method> parse_method(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (lower == "none") return Method::None;
  if (lower == "cse") return Method::Cse;
  if (lower == "greedy") return Method::Greedy;
  if (lower == "csegreedy") return Method::CseGreedy;
  return std::nullopt;
}

inline std::optional<HornerMethod> parse_horner(std::string_view s) {
  if (s == "occurrence") return HornerMethod::Occurrence;
  if (s == "mcts") return HornerMethod::Mcts;
  return std::nullopt;
}

struct OptimizerSettings {
  Level level = Level::O0;
  HornerMethod horner = HornerMethod::Occurrence;
  Direction direction = Direction::ForwardOrBackward;
  MctsSettings mcts;
  Method method = Method::None;
  GreedySettings greedy;
  bool stats = false;
  double time_limit_seconds = 0.0;
  std::optional<std::vector<VarId>> scheme;
  bool print_scheme = false;
  bool debug = false;
  std::uint64_t seed = 0;
  CostModel cost;

  // Level defaults. Fields changed afterwards override the preset.
  static OptimizerSettings preset(Level level) {
    OptimizerSettings s;
    s.level = level;
    switch (level) {
      case Level::O0: break;
      case Level::O1: s.method = Method::Cse; break;
      case Level::O2:
        s.method = Method::Greedy;
        s.greedy.min_number = 10;
        s.greedy.max_percentage = 5.0;
        break;
      case Level::O3:
        s.horner = HornerMethod::Mcts;
        s.method = Method::Greedy;
        s.mcts.cp = 1.0;
        s.mcts.num_expand = 1000;
        s.mcts.num_keep = 10;
        s.mcts.num_repeat = 1;
        break;
    }
    return s;
  }

  // Splits an overall limit evenly between the tree search and the greedy passes.
  void set_time_limit(double seconds) {
    if (seconds < 0.0) throw std::invalid_argument("time limit must not be negative");
    time_limit_seconds = seconds;
    mcts.time_limit_seconds = seconds / 2.0;
    greedy.time_limit_seconds = seconds / 2.0;
  }

  void validate() const {
    mcts.validate();
    greedy.validate();
    if (time_limit_seconds < 0.0) throw std::invalid_argument("time limit must not be negative");
  }
};

}  // namespace polyopt
