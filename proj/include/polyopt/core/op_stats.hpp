#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

namespace polyopt {

// Multiplications used by binary powering.
inline std::uint64_t binary_power_cost(std::uint32_t n) {
  if (n < 2) return 0;
  return static_cast<std::uint64_t>(std::bit_width(n) - 1) + static_cast<std::uint64_t>(std::popcount(n)) - 1;
}

struct CostModel {
  std::function<std::uint64_t(std::uint32_t)> power_cost = binary_power_cost;
};

struct OpStats {
  std::uint64_t powers = 0;           // exponent >= 3
  std::uint64_t multiplications = 0;  // squares included
  std::uint64_t additions = 0;
  std::uint64_t power_weight = 0;     // sum of power costs of the counted powers

  std::uint64_t total() const { return additions + multiplications + power_weight; }

  // Accounts for one power x^n of an operand.
  void add_power(std::uint32_t n, const CostModel& model) {
    if (n == 2) {
      ++multiplications;
    } else if (n > 2) {
      ++powers;
      power_weight += model.power_cost(n);
    }
  }

  OpStats& operator+=(const OpStats& o) {
    powers += o.powers;
    multiplications += o.multiplications;
    additions += o.additions;
    power_weight += o.power_weight;
    return *this;
  }

  friend OpStats operator+(OpStats a, const OpStats& b) { return a += b; }
  friend bool operator==(const OpStats&, const OpStats&) = default;

  // "1P 16M 5A : 23"
  std::string str() const {
    std::ostringstream os;
    os << powers << "P " << multiplications << "M " << additions << "A : " << total();
    return os.str();
  }
};

inline std::ostream& operator<<(std::ostream& os, const OpStats& s) { return os << s.str(); }

}  // namespace polyopt
