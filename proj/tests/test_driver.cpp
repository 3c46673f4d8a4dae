#include "support.hpp"

#include "polyopt/core/count.hpp"
#include "polyopt/core/evaluate.hpp"
#include "polyopt/core/expand.hpp"
#include "polyopt/driver/optimize.hpp"
#include "polyopt/driver/resultant.hpp"
#include "polyopt/driver/scatter.hpp"
#include "polyopt/driver/settings.hpp"
#include "polyopt/driver/shift.hpp"
#include "polyopt/frontend/parser.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace polyopt;
using polyopt::gen::random_polynomial;

namespace {

// Leibniz expansion over all permutations; fine for matrices up to 5x5.
Polynomial determinant(const std::vector<std::vector<Polynomial>>& m) {
  const std::size_t n = m.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Polynomial det;
  do {
    int inversions = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (perm[i] > perm[j]) ++inversions;
    Polynomial term = Polynomial::constant(Integer(inversions % 2 ? -1 : 1));
    for (std::size_t i = 0; i < n; ++i) term = term * m[i][perm[i]];
    det = det + term;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return det;
}

Polynomial sylvester_oracle(unsigned m, unsigned n) {
  const std::size_t size = m + n;
  std::vector<std::vector<Polynomial>> mat(size, std::vector<Polynomial>(size));
  for (std::size_t r = 0; r < n; ++r)
    for (unsigned i = 0; i <= m; ++i) mat[r][r + i] = Polynomial::variable(static_cast<VarId>(m - i));
  for (std::size_t r = 0; r < m; ++r)
    for (unsigned i = 0; i <= n; ++i) mat[n + r][r + i] = Polynomial::variable(static_cast<VarId>(m + 1 + n - i));
  return determinant(mat);
}

const Symbols& xyzu() {
  static const Symbols s(std::vector<std::string>{"x", "y", "z", "u"});
  return s;
}

}  // namespace

TEST(Resultant, SmallestCase) {
  const auto fx = resultant_fixture(1, 1);
  EXPECT_EQ(fx.symbols.names(), (std::vector<std::string>{"a0", "a1", "b0", "b1"}));
  const auto expected = parse("a1*b0 - a0*b1", fx.symbols);
  EXPECT_TRUE(fx.resultant == expected || fx.resultant == -expected);
}

TEST(Resultant, MatchesDeterminantOracle) {
  for (unsigned m = 1; m <= 3; ++m)
    for (unsigned n = 1; n <= m && m + n <= 5; ++n) {
      const auto fx = resultant_fixture(m, n);
      const auto oracle = sylvester_oracle(m, n);
      EXPECT_TRUE(fx.resultant == oracle || fx.resultant == -oracle) << m << "-" << n;
    }
}

TEST(Resultant, RejectsBadDegrees) {
  EXPECT_THROW(resultant_fixture(0, 0), std::invalid_argument);
  EXPECT_THROW(resultant_fixture(2, 3), std::invalid_argument);
  EXPECT_THROW(resultant_fixture(8, 1), std::invalid_argument);
}

TEST(Presets, Levels) {
  const auto o0 = OptimizerSettings::preset(Level::O0);
  EXPECT_EQ(o0.method, Method::None);
  const auto o1 = OptimizerSettings::preset(Level::O1);
  EXPECT_EQ(o1.horner, HornerMethod::Occurrence);
  EXPECT_EQ(o1.method, Method::Cse);
  const auto o2 = OptimizerSettings::preset(Level::O2);
  EXPECT_EQ(o2.method, Method::Greedy);
  EXPECT_EQ(o2.greedy.min_number, 10u);
  EXPECT_DOUBLE_EQ(o2.greedy.max_percentage, 5.0);
  const auto o3 = OptimizerSettings::preset(Level::O3);
  EXPECT_EQ(o3.horner, HornerMethod::Mcts);
  EXPECT_EQ(o3.method, Method::Greedy);
  EXPECT_DOUBLE_EQ(o3.mcts.cp, 1.0);
  EXPECT_EQ(o3.mcts.num_expand, 1000u);
  EXPECT_EQ(o3.mcts.num_keep, 10u);
  EXPECT_EQ(o3.mcts.num_repeat, 1u);
}

TEST(Presets, ExplicitFieldsOverride) {
  auto s = OptimizerSettings::preset(Level::O3);
  s.method = Method::Cse;
  s.mcts.num_expand = 50;
  const auto p = parse("6*y*z^2+3*y^3-3*x*z^2+6*x*y*z-3*x^2*z+6*x^2*y", xyzu());
  const auto r = optimize(p, s);
  EXPECT_TRUE(equivalent(p, r.program));
  EXPECT_LE(r.tried.size(), s.mcts.num_keep);
  s.set_time_limit(4.0);
  EXPECT_DOUBLE_EQ(s.mcts.time_limit_seconds, 2.0);
  EXPECT_DOUBLE_EQ(s.greedy.time_limit_seconds, 2.0);
  EXPECT_THROW(s.set_time_limit(-1), std::invalid_argument);
}

TEST(Presets, MethodParsing) {
  EXPECT_EQ(parse_method("CseGreedy"), Method::CseGreedy);
  EXPECT_FALSE(parse_method("fast").has_value());
  EXPECT_EQ(parse_horner("mcts"), HornerMethod::Mcts);
  EXPECT_FALSE(parse_horner("random").has_value());
}

TEST(Optimize, LevelZeroIsTermByTerm) {
  Rng rng(71);
  for (int k = 0; k < 30; ++k) {
    const auto p = random_polynomial(rng, {.variables = 5, .terms = 25, .max_coeff = 9, .max_exponent = 4, .density = 50});
    const auto r = optimize(p, OptimizerSettings::preset(Level::O0));
    EXPECT_EQ(r.before, r.after);
    EXPECT_EQ(r.after, count_operations(p));
    EXPECT_EQ(expand(r.program).front(), p);
  }
}

TEST(Optimize, DenominatorsAndSeveralOutputs) {
  const auto f = parse("(x+y)^3/6", xyzu());
  const auto g = parse("(x+y)^2*z/4 + 1", xyzu());
  const std::vector<Polynomial> both{f, g};
  for (Level level : {Level::O0, Level::O1, Level::O2, Level::O3}) {
    const auto r = optimize(both, {"F", "G"}, OptimizerSettings::preset(level));
    const auto values = expand(r.program);
    ASSERT_EQ(values.size(), 2u);
    EXPECT_EQ(values[0], f);
    EXPECT_EQ(values[1], g);
    EXPECT_EQ(r.program.outputs[1].name, "G");
  }
}

TEST(Optimize, LevelsImproveWorkedExample) {
  const auto p = parse("6*y*z^2+3*y^3-3*x*z^2+6*x*y*z-3*x^2*z+6*x^2*y", xyzu());
  EXPECT_EQ(optimize(p, OptimizerSettings::preset(Level::O1)).after.total(), 15u);
  EXPECT_EQ(optimize(p, OptimizerSettings::preset(Level::O2)).after.total(), 14u);
  EXPECT_LE(optimize(p, OptimizerSettings::preset(Level::O3)).after.total(), 12u);
}

TEST(Optimize, FixedSchemeIsUsed) {
  const auto p = parse("y - 3*x + 5*x*z + 2*x^2*y*z - 3*x^2*y^2*z + 5*x^2*y^2*z^2", xyzu());
  auto s = OptimizerSettings::preset(Level::O1);
  s.scheme = std::vector<VarId>{2, 0, 1};
  const auto r = optimize(p, s);
  EXPECT_EQ(r.order.sequence, (std::vector<VarId>{2, 0, 1}));
  ASSERT_EQ(r.tried.size(), 1u);
}

TEST(Optimize, Errors) {
  const auto p = parse("x + y", xyzu());
  EXPECT_THROW(optimize(std::vector<Polynomial>{}, {}, OptimizerSettings::preset(Level::O1)), std::invalid_argument);
  EXPECT_THROW(optimize(std::vector<Polynomial>{p}, {"F", "G"}, OptimizerSettings::preset(Level::O1)),
               std::invalid_argument);
  auto bad = OptimizerSettings::preset(Level::O3);
  bad.mcts.num_keep = 0;
  EXPECT_THROW(optimize(p, bad), std::invalid_argument);
}

TEST(Bracket, SplitsByOutsideVariableAndReassembles) {
  const auto h = parse("u*(x + y + z)^2 + u^2*(x + 2*y + z)^2 + x", xyzu());
  const auto b = bracket_by(h, 3, "H");
  ASSERT_EQ(b.brackets.size(), 3u);
  EXPECT_EQ(b.brackets[0].key, "H_0");
  EXPECT_EQ(b.brackets[2].key, "H_2");
  const auto r = optimize(b, OptimizerSettings::preset(Level::O2));
  const auto values = expand(r.program);
  Polynomial back;
  for (std::size_t e = 0; e < values.size(); ++e) back = back + Polynomial::variable(3, static_cast<std::uint32_t>(e)) * values[e];
  EXPECT_EQ(back, h);
}

TEST(Bracket, DuplicateKeysRejected) {
  BracketedExpression b{{{"K", parse("x", xyzu())}, {"K", parse("y", xyzu())}}};
  EXPECT_THROW(optimize(b, OptimizerSettings::preset(Level::O1)), std::invalid_argument);
}

TEST(Shift, ShortensSquareOfSum) {
  const auto p = parse("(x+y)^2 + (x+y)", xyzu());
  EXPECT_EQ(p.size(), 5u);
  const auto r = shift_search(p, {{0, 1}}, xyzu());
  ASSERT_EQ(r.rules.size(), 1u);
  EXPECT_EQ(r.shifted.size(), 2u);
  // Substituting the unshift program's outputs into the shifted polynomial gives p back.
  const auto unshift = expand(r.unshift);
  ASSERT_EQ(r.unshift.outputs.size(), 1u);
  const VarId target = xyzu().at(r.unshift.outputs[0].name);
  EXPECT_EQ(r.shifted.substitute(target, unshift[0]), p);
}

TEST(Shift, TermCountStrictlyDecreasesAndComposes) {
  Rng rng(72);
  for (int k = 0; k < 20; ++k) {
    // p(x + a*y + b, y, z) for random a, b keeps the structure a shift can undo.
    const auto base = random_polynomial(rng, {.variables = 3, .terms = 6, .max_coeff = 5, .max_exponent = 3, .density = 60});
    const auto a = Polynomial::constant(Integer(gen::uniform_int(rng, -3, 3)));
    const auto c = Polynomial::constant(Integer(gen::uniform_int(rng, -3, 3)));
    const auto p = base.substitute(0, Polynomial::variable(0) + a * Polynomial::variable(1) + c);
    const auto r = shift_search(p, {{0, 1, 2}}, xyzu());
    EXPECT_LE(r.shifted.size(), p.size());
    if (!r.rules.empty()) {
      EXPECT_LT(r.shifted.size(), p.size());
    }
    // Apply the unshift outputs simultaneously through fresh names to compare.
    Polynomial back = r.shifted;
    const auto values = expand(r.unshift);
    std::vector<std::pair<VarId, Polynomial>> subs;
    for (std::size_t i = 0; i < values.size(); ++i) subs.push_back({xyzu().at(r.unshift.outputs[i].name), values[i]});
    std::vector<VarId> fresh;
    for (std::size_t i = 0; i < subs.size(); ++i) fresh.push_back(static_cast<VarId>(10 + i));
    for (std::size_t i = 0; i < subs.size(); ++i) back = back.substitute(subs[i].first, Polynomial::variable(fresh[i]));
    for (std::size_t i = 0; i < subs.size(); ++i) back = back.substitute(fresh[i], subs[i].second);
    EXPECT_EQ(back, p) << k;
  }
}

TEST(Shift, ResultantIsLeftAlone) {
  const auto fx = resultant_fixture(3, 2);
  const auto r = shift_search(fx.resultant, single_group(fx.symbols), fx.symbols);
  EXPECT_TRUE(r.rules.empty());
  EXPECT_EQ(r.shifted, fx.resultant);
  EXPECT_TRUE(r.unshift.outputs.empty());
}

TEST(Shift, GroupValidation) {
  const auto p = parse("x + y", xyzu());
  EXPECT_THROW(shift_search(p, {{0, 1}, {1, 2}}, xyzu()), std::invalid_argument);
  EXPECT_THROW(shift_search(p, {{0, 9}}, xyzu()), std::invalid_argument);
}

TEST(Scatter, DrawsStayInRange) {
  Rng rng(73);
  for (int k = 0; k < 2000; ++k) {
    const double log_cp = draw_cp(rng, 0.01, 10.0, Distribution::Log);
    EXPECT_GE(log_cp, 0.01);
    EXPECT_LE(log_cp, 10.0);
    const double lin_cp = draw_cp(rng, 0.0, 2.0, Distribution::Lin);
    EXPECT_GE(lin_cp, 0.0);
    EXPECT_LE(lin_cp, 2.0);
  }
  EXPECT_THROW(check_range(0.0, 1.0, Distribution::Log), std::invalid_argument);
  EXPECT_THROW(check_range(2.0, 1.0, Distribution::Lin), std::invalid_argument);
}

TEST(Scatter, RowsAndDeterminism) {
  const auto p = parse("6*y*z^2+3*y^3-3*x*z^2+6*x*y*z-3*x^2*z+6*x^2*y", xyzu());
  auto s = OptimizerSettings::preset(Level::O3);
  s.mcts.num_expand = 30;
  const std::vector<Polynomial> polys{p};
  const auto a = scatter_experiment(polys, {"F"}, s, 6, 0.01, 10.0, Distribution::Log, 5);
  const auto b = scatter_experiment(polys, {"F"}, s, 6, 0.01, 10.0, Distribution::Log, 5);
  ASSERT_EQ(a.size(), 6u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].cp, b[i].cp);
    EXPECT_EQ(a[i].final_ops, b[i].final_ops);
    EXPECT_EQ(a[i].seed, b[i].seed);
  }
  std::ostringstream empty;
  write_csv(empty, scatter_experiment(polys, {"F"}, s, 0, 0.01, 10.0, Distribution::Log, 5));
  EXPECT_EQ(empty.str(), "cp,final_ops,seed,elapsed_ms\n");
  std::ostringstream csv;
  write_csv(csv, a);
  const auto text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 7);
}
