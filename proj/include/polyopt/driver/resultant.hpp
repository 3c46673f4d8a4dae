#pragma once

#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/symbols.hpp"

#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

struct ResultantFixture {
  Symbols symbols;  // a0..am, b0..bn
  Polynomial resultant;
};

// Determinant of the Sylvester matrix of A = sum a_i x^i (degree m) and
// B = sum b_i x^i (degree n), expanded over the symbolic coefficients.
inline ResultantFixture resultant_fixture(unsigned m, unsigned n) {
  if (n < 1 || m < n || m > 7) throw std::invalid_argument("resultant fixture needs 1 <= n <= m <= 7");
  ResultantFixture fx;
  for (unsigned i = 0; i <= m; ++i) fx.symbols.add("a" + std::to_string(i));
  for (unsigned i = 0; i <= n; ++i) fx.symbols.add("b" + std::to_string(i));
  const unsigned size = m + n;

  // entry[r][c]: variable id or none.
  std::vector<std::vector<std::optional<VarId>>> entry(size, std::vector<std::optional<VarId>>(size));
  for (unsigned r = 0; r < n; ++r)
    for (unsigned k = 0; k <= m; ++k) entry[r][r + k] = static_cast<VarId>(m - k);
  for (unsigned r = 0; r < m; ++r)
    for (unsigned k = 0; k <= n; ++k) entry[n + r][r + k] = static_cast<VarId>(m + 1 + n - k);

  // minor[mask]: determinant of the first popcount(mask) rows restricted to the
  // columns in mask, built one row at a time by expansion along the last row.
  const std::uint32_t full = (1U << size) - 1;
  std::vector<Polynomial> previous(full + 1);
  previous[0] = Polynomial::constant(1);
  std::vector<bool> live_previous(full + 1, false);
  live_previous[0] = true;
  for (unsigned row = 0; row < size; ++row) {
    std::vector<Polynomial> current(full + 1);
    std::vector<bool> live(full + 1, false);
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      if (static_cast<unsigned>(std::popcount(mask)) != row + 1) continue;
      std::vector<Term> raw;
      for (unsigned c = 0; c < size; ++c) {
        if (!(mask & (1U << c)) || !entry[row][c]) continue;
        const std::uint32_t rest = mask & ~(1U << c);
        if (!live_previous[rest]) continue;
        const bool negative = (std::popcount(mask >> (c + 1)) % 2) == 1;
        const Monomial var = Monomial::variable(*entry[row][c]);
        for (const auto& t : previous[rest].terms())
          raw.push_back({negative ? Integer(-t.coeff) : t.coeff, t.monomial * var});
      }
      if (raw.empty()) continue;
      current[mask] = Polynomial::normalize(std::move(raw));
      live[mask] = !current[mask].is_zero();
    }
    previous = std::move(current);
    live_previous = std::move(live);
  }
  fx.resultant = previous[full];
  return fx;
}

}  // namespace polyopt
