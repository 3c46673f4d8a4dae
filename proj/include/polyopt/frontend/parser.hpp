#pragma once

#include "polyopt/core/polynomial.hpp"
#include "polyopt/core/symbols.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace polyopt {

struct SourceExpression {
  std::string name;
  std::string text;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t position)
      : std::runtime_error(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const { return position_; }

 private:
  std::size_t position_;
};

// Maps an identifier (possibly indexed, like tmp(3)) to its value.
using IdentifierResolver = std::function<std::optional<Polynomial>(const std::string&)>;

namespace detail {

class ExpressionParser {
 public:
  ExpressionParser(std::string_view text, IdentifierResolver resolve, std::set<std::string> arrays)
      : text_(text), resolve_(std::move(resolve)), arrays_(std::move(arrays)) {}

  Polynomial parse_all() {
    Polynomial p = expression();
    skip_space();
    if (pos_ != text_.size()) throw ParseError("unexpected '" + std::string(1, text_[pos_]) + "'", pos_);
    return p;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  Polynomial expression() {
    Polynomial acc = product();
    for (;;) {
      if (accept("+"))
        acc = acc + product();
      else if (accept("-"))
        acc = acc - product();
      else
        return acc;
    }
  }

  Polynomial product() {
    Polynomial acc = unary();
    for (;;) {
      if (peek() == '*' && text_.substr(pos_, 2) != "**") {
        ++pos_;
        acc = acc * unary();
      } else if (peek() == '/') {
        const std::size_t at = pos_++;
        const Polynomial divisor = unary();
        if (!divisor.is_constant()) throw ParseError("division by non-constant", at);
        if (divisor.is_zero()) throw ParseError("division by zero", at);
        acc = (acc * Polynomial::constant(divisor.denominator())).divided_by(divisor.terms().front().coeff);
      } else {
        return acc;
      }
    }
  }

  Polynomial unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }

  Polynomial power() {
    Polynomial base = primary();
    if (accept("^") || accept("**")) {
      const std::size_t at = pos_;
      bool negative = false;
      bool parens = accept("(");
      if (accept("-")) negative = true;
      else accept("+");
      skip_space();
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw ParseError("non-integer exponent", at);
      const Integer e = integer_literal();
      if (parens && !accept(")")) throw ParseError("expected ')'", pos_);
      if (peek() == '.') throw ParseError("non-integer exponent", at);
      if (negative && e != 0) throw ParseError("negative exponent", at);
      if (e > 1000000) throw ParseError("exponent too large", at);
      return base.pow(e.convert_to<std::uint32_t>());
    }
    return base;
  }

  Integer integer_literal() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return Integer(std::string(text_.substr(start, pos_ - start)));
  }

  Polynomial primary() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Polynomial inner = expression();
      if (!accept(")")) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      const std::size_t at = pos_;
      Integer v = integer_literal();
      if (pos_ < text_.size() && text_[pos_] == '.') throw ParseError("non-integer constant", at);
      return Polynomial::constant(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t at = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        ++pos_;
      std::string ident(text_.substr(at, pos_ - at));
      if (arrays_.count(ident) != 0 && (peek() == '(' || peek() == '[')) {
        const char close = text_[pos_] == '(' ? ')' : ']';
        ++pos_;
        skip_space();
        ident += "(" + integer_literal().str() + ")";
        if (!accept(std::string_view(&close, 1))) throw ParseError("expected index close", pos_);
      }
      if (auto v = resolve_(ident)) return *v;
      throw ParseError("undeclared symbol '" + ident + "'", at);
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", pos_);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  IdentifierResolver resolve_;
  std::set<std::string> arrays_;
};

}  // namespace detail

inline IdentifierResolver symbol_resolver(const Symbols& symbols) {
  return [&symbols](const std::string& name) -> std::optional<Polynomial> {
    if (auto id = symbols.find(name)) return Polynomial::variable(*id);
    return std::nullopt;
  };
}

inline Polynomial parse(std::string_view text, const Symbols& symbols) {
  return detail::ExpressionParser(text, symbol_resolver(symbols), {}).parse_all();
}

inline Polynomial parse(const SourceExpression& source, const Symbols& symbols) {
  return parse(source.text, symbols);
}

// Reads straight-line assignments "lhs = rhs;" in order; every right-hand side may
// use the declared symbols and any name assigned earlier. Returns the value of each
// assigned name, expanded over the symbols. `arrays` lists indexed names like tmp.
inline std::map<std::string, Polynomial> parse_assignments(std::string_view text, const Symbols& symbols,
                                                           std::set<std::string> arrays = {}) {
  std::string stripped;
  stripped.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      if (i == text.size()) break;
    }
    stripped += text[i];
  }
  text = stripped;
  std::map<std::string, Polynomial> values;
  IdentifierResolver resolve = [&](const std::string& name) -> std::optional<Polynomial> {
    if (auto it = values.find(name); it != values.end()) return it->second;
    if (auto id = symbols.find(name)) return Polynomial::variable(*id);
    return std::nullopt;
  };
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find(';', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view stmt = text.substr(start, end - start);
    start = end + 1;
    const auto first = stmt.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) continue;
    stmt = stmt.substr(first);
    const auto eq = stmt.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected '='", start - stmt.size() - 1);
    std::string lhs(stmt.substr(0, eq));
    std::erase_if(lhs, [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) != 0; });
    for (auto& ch : lhs)
      if (ch == '[') ch = '(';
      else if (ch == ']') ch = ')';
    Polynomial rhs = detail::ExpressionParser(stmt.substr(eq + 1), resolve, arrays).parse_all();
    values[lhs] = std::move(rhs);
  }
  return values;
}

}  // namespace polyopt
