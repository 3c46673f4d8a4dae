#pragma once

#include "polyopt/core/random.hpp"
#include "polyopt/driver/optimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

enum class Distribution { Log, Lin };

struct ScatterRow {
  double cp = 0.0;
  std::uint64_t final_ops = 0;
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
};

inline void check_range(double lo, double hi, Distribution d) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || lo > hi) throw std::invalid_argument("invalid cp range");
  if (d == Distribution::Log && lo <= 0.0) throw std::invalid_argument("log distribution needs a positive range");
}

inline double draw_cp(Rng& rng, double lo, double hi, Distribution d) {
  const double u = uniform_real(rng);
  if (d == Distribution::Lin) return lo + u * (hi - lo);
  const double v = std::exp(std::log(lo) + u * (std::log(hi) - std::log(lo)));
  return std::clamp(v, lo, hi);
}

// One optimize run per drawn cp; every sample gets its own derived seed.
inline std::vector<ScatterRow> scatter_experiment(std::span<const Polynomial> polys,
                                                  const std::vector<std::string>& names,
                                                  const OptimizerSettings& base, std::size_t samples, double lo,
                                                  double hi, Distribution d, std::uint64_t seed) {
  check_range(lo, hi, d);
  Rng rng(seed);
  std::vector<ScatterRow> rows;
  rows.reserve(samples);
  for (std::size_t k = 0; k < samples; ++k) {
    OptimizerSettings s = base;
    s.mcts.cp = draw_cp(rng, lo, hi, d);
    s.seed = derive_seed(seed, k);
    const auto start = std::chrono::steady_clock::now();
    const auto result = optimize(polys, names, s);
    const auto end = std::chrono::steady_clock::now();
    rows.push_back({s.mcts.cp, result.after.total(), s.seed,
                    std::chrono::duration<double, std::milli>(end - start).count()});
  }
  return rows;
}

inline void write_csv(std::ostream& os, const std::vector<ScatterRow>& rows) {
  os << "cp,final_ops,seed,elapsed_ms\n";
  const auto old = os.precision(17);
  for (const auto& r : rows) os << r.cp << ',' << r.final_ops << ',' << r.seed << ',' << r.elapsed_ms << '\n';
  os.precision(old);
}

}  // namespace polyopt
