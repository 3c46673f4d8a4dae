#pragma once

#include "polyopt/core/integer.hpp"
#include "polyopt/core/symbols.hpp"

#include <algorithm>
#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace polyopt {

struct Factor {
  VarId var = 0;
  std::uint32_t exponent = 0;
  friend bool operator==(const Factor&, const Factor&) = default;
};

// Product of variable powers, kept sorted by variable id with positive exponents.
class Monomial {
 public:
  Monomial() = default;

  explicit Monomial(std::vector<Factor> factors) : factors_(std::move(factors)) {
    std::sort(factors_.begin(), factors_.end(),
              [](const Factor& a, const Factor& b) { return a.var < b.var; });
    std::vector<Factor> merged;
    merged.reserve(factors_.size());
    for (const auto& f : factors_) {
      if (!merged.empty() && merged.back().var == f.var)
        merged.back().exponent += f.exponent;
      else
        merged.push_back(f);
    }
    std::erase_if(merged, [](const Factor& f) { return f.exponent == 0; });
    factors_ = std::move(merged);
  }

  static Monomial variable(VarId v, std::uint32_t exponent = 1) {
    Monomial m;
    if (exponent > 0) m.factors_.push_back({v, exponent});
    return m;
  }

  const std::vector<Factor>& factors() const { return factors_; }
  bool is_constant() const { return factors_.empty(); }

  std::uint32_t exponent(VarId v) const {
    for (const auto& f : factors_)
      if (f.var == v) return f.exponent;
    return 0;
  }

  std::uint64_t degree() const {
    std::uint64_t d = 0;
    for (const auto& f : factors_) d += f.exponent;
    return d;
  }

  Monomial operator*(const Monomial& other) const {
    Monomial r;
    r.factors_.reserve(factors_.size() + other.factors_.size());
    auto a = factors_.begin();
    auto b = other.factors_.begin();
    while (a != factors_.end() && b != other.factors_.end()) {
      if (a->var == b->var) {
        r.factors_.push_back({a->var, a->exponent + b->exponent});
        ++a;
        ++b;
      } else if (a->var < b->var) {
        r.factors_.push_back(*a++);
      } else {
        r.factors_.push_back(*b++);
      }
    }
    r.factors_.insert(r.factors_.end(), a, factors_.end());
    r.factors_.insert(r.factors_.end(), b, other.factors_.end());
    return r;
  }

  // The monomial with variable v removed entirely.
  Monomial without(VarId v) const {
    Monomial r;
    for (const auto& f : factors_)
      if (f.var != v) r.factors_.push_back(f);
    return r;
  }

  friend bool operator==(const Monomial&, const Monomial&) = default;

  // Graded lexicographic comparison of exponent vectors: higher degree is greater,
  // then the larger exponent at the lowest differing variable id.
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
    if (auto c = a.degree() <=> b.degree(); c != 0) return c;
    auto i = a.factors_.begin();
    auto j = b.factors_.begin();
    while (i != a.factors_.end() && j != b.factors_.end()) {
      if (i->var != j->var) return i->var < j->var ? std::strong_ordering::greater : std::strong_ordering::less;
      if (i->exponent != j->exponent) return i->exponent <=> j->exponent;
      ++i;
      ++j;
    }
    if (i != a.factors_.end()) return std::strong_ordering::greater;
    if (j != b.factors_.end()) return std::strong_ordering::less;
    return std::strong_ordering::equal;
  }

 private:
  std::vector<Factor> factors_;
};

struct Term {
  Integer coeff;
  Monomial monomial;
  friend bool operator==(const Term&, const Term&) = default;
};

// Canonical sparse polynomial: numerator terms in descending graded-lex order
// over one positive common denominator.
class Polynomial {
 public:
  Polynomial() = default;

  static Polynomial constant(const Integer& c) {
    Polynomial p;
    if (c != 0) p.terms_.push_back({c, Monomial{}});
    return p;
  }

  static Polynomial variable(VarId v, std::uint32_t exponent = 1) {
    Polynomial p;
    p.terms_.push_back({Integer(1), Monomial::variable(v, exponent)});
    return p;
  }

  static Polynomial normalize(std::vector<Term> raw, Integer denominator = 1) {
    if (denominator == 0) throw std::domain_error("zero denominator");
    std::sort(raw.begin(), raw.end(),
              [](const Term& a, const Term& b) { return a.monomial > b.monomial; });
    Polynomial p;
    p.terms_.reserve(raw.size());
    for (auto& t : raw) {
      if (!p.terms_.empty() && p.terms_.back().monomial == t.monomial) {
        p.terms_.back().coeff += t.coeff;
        if (p.terms_.back().coeff == 0) p.terms_.pop_back();
      } else if (t.coeff != 0) {
        p.terms_.push_back(std::move(t));
      }
    }
    p.denominator_ = std::move(denominator);
    p.reduce_denominator();
    return p;
  }

  const std::vector<Term>& terms() const { return terms_; }
  const Integer& denominator() const { return denominator_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.front().monomial.is_constant());
  }

  // One past the largest variable id occurring.
  std::size_t variable_bound() const {
    std::size_t bound = 0;
    for (const auto& t : terms_)
      if (!t.monomial.factors().empty())
        bound = std::max<std::size_t>(bound, t.monomial.factors().back().var + 1);
    return bound;
  }

  std::vector<VarId> variables() const {
    std::vector<bool> seen(variable_bound(), false);
    for (const auto& t : terms_)
      for (const auto& f : t.monomial.factors()) seen[f.var] = true;
    std::vector<VarId> vars;
    for (VarId v = 0; v < seen.size(); ++v)
      if (seen[v]) vars.push_back(v);
    return vars;
  }

  // Content of the numerator with the sign of the leading term.
  Integer content() const {
    Integer g = 0;
    for (const auto& t : terms_) g = gcd(g, t.coeff);
    if (!terms_.empty() && terms_.front().coeff < 0) g = -g;
    return g;
  }

  Polynomial operator-() const {
    Polynomial r = *this;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    if (a.denominator_ == b.denominator_) {
      Polynomial r = merge(a.terms_, b.terms_, 1, 1);
      r.denominator_ = a.denominator_;
      r.reduce_denominator();
      return r;
    }
    const Integer g = gcd(a.denominator_, b.denominator_);
    const Integer fa = b.denominator_ / g;
    const Integer fb = a.denominator_ / g;
    Polynomial r = merge(a.terms_, b.terms_, fa, fb);
    r.denominator_ = a.denominator_ * fa;
    r.reduce_denominator();
    return r;
  }

  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<Term> raw;
    raw.reserve(a.terms_.size() * b.terms_.size());
    for (const auto& s : a.terms_)
      for (const auto& t : b.terms_) raw.push_back({s.coeff * t.coeff, s.monomial * t.monomial});
    return normalize(std::move(raw), a.denominator_ * b.denominator_);
  }

  // This polynomial multiplied by c * m; preserves term order.
  Polynomial times_term(const Integer& c, const Monomial& m) const {
    Polynomial r;
    r.denominator_ = denominator_;
    if (c == 0) return r;
    r.terms_.reserve(terms_.size());
    for (const auto& t : terms_) r.terms_.push_back({t.coeff * c, t.monomial * m});
    r.reduce_denominator();
    return r;
  }

  Polynomial pow(std::uint32_t exponent) const {
    Polynomial result = constant(1);
    Polynomial base = *this;
    while (exponent != 0) {
      if (exponent & 1U) result = result * base;
      exponent >>= 1U;
      if (exponent != 0) base = base * base;
    }
    return result;
  }

  Polynomial divided_by(const Integer& d) const {
    if (d == 0) throw std::domain_error("division by zero");
    Polynomial r = *this;
    r.denominator_ *= d;
    r.reduce_denominator();
    return r;
  }

  // Replaces variable v by the polynomial value.
  Polynomial substitute(VarId v, const Polynomial& value) const {
    std::vector<Polynomial> powers{constant(1)};
    std::vector<Term> raw;
    Integer common = 1;
    for (const auto& t : terms_) {
      const std::uint32_t e = t.monomial.exponent(v);
      while (powers.size() <= e) powers.push_back(powers.back() * value);
      common = boost::multiprecision::lcm(common, powers[e].denominator_);
    }
    for (const auto& t : terms_) {
      const auto& pw = powers[t.monomial.exponent(v)];
      const Integer scale = t.coeff * (common / pw.denominator_);
      const Monomial rest = t.monomial.without(v);
      for (const auto& s : pw.terms_) raw.push_back({s.coeff * scale, s.monomial * rest});
    }
    return normalize(std::move(raw), denominator_ * common);
  }

  friend bool operator==(const Polynomial&, const Polynomial&) = default;

 private:
  static Polynomial merge(const std::vector<Term>& a, const std::vector<Term>& b, const Integer& fa,
                          const Integer& fb) {
    Polynomial r;
    r.terms_.reserve(a.size() + b.size());
    auto i = a.begin();
    auto j = b.begin();
    auto push = [&r](Integer c, const Monomial& m) {
      if (c != 0) r.terms_.push_back({std::move(c), m});
    };
    while (i != a.end() && j != b.end()) {
      const auto c = i->monomial <=> j->monomial;
      if (c == 0) {
        push(i->coeff * fa + j->coeff * fb, i->monomial);
        ++i;
        ++j;
      } else if (c > 0) {
        push(i->coeff * fa, i->monomial);
        ++i;
      } else {
        push(j->coeff * fb, j->monomial);
        ++j;
      }
    }
    for (; i != a.end(); ++i) push(i->coeff * fa, i->monomial);
    for (; j != b.end(); ++j) push(j->coeff * fb, j->monomial);
    return r;
  }

  void reduce_denominator() {
    if (denominator_ < 0) {
      denominator_ = -denominator_;
      for (auto& t : terms_) t.coeff = -t.coeff;
    }
    if (denominator_ == 1) return;
    if (terms_.empty()) {
      denominator_ = 1;
      return;
    }
    Integer g = denominator_;
    for (const auto& t : terms_) {
      if (g == 1) break;
      g = gcd(g, t.coeff);
    }
    if (g == 1) return;
    denominator_ /= g;
    for (auto& t : terms_) t.coeff /= g;
  }

  std::vector<Term> terms_;
  Integer denominator_{1};
};

}  // namespace polyopt
