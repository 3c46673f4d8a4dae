#pragma once

#include "polyopt/core/symbols.hpp"
#include "polyopt/frontend/parser.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

struct InputFile {
  Symbols symbols;
  std::vector<SourceExpression> expressions;
};

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Format: a "symbols:" line declaring variables (comma or space separated), then
// statements "name = expression;" which may span lines. '#' starts a comment.
inline InputFile read_input(std::string_view text) {
  InputFile in;
  std::string body;
  bool have_symbols = false;
  std::istringstream lines{std::string(text)};
  std::string line;
  while (std::getline(lines, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (!have_symbols && line.compare(first, 8, "symbols:") == 0) {
      std::string list = line.substr(first + 8);
      for (auto& ch : list)
        if (ch == ',') ch = ' ';
      std::istringstream names(list);
      std::string name;
      while (names >> name) in.symbols.add(name);
      have_symbols = true;
      continue;
    }
    body += line;
    body += '\n';
  }
  if (!have_symbols) throw InputError("missing 'symbols:' header");
  std::size_t start = 0;
  while (true) {
    const auto end = body.find(';', start);
    const std::string stmt = body.substr(start, end == std::string::npos ? std::string::npos : end - start);
    const auto first = stmt.find_first_not_of(" \t\r\n");
    if (first != std::string::npos) {
      if (end == std::string::npos) throw InputError("statement without terminating ';'");
      const auto eq = stmt.find('=');
      if (eq == std::string::npos) throw InputError("statement without '='");
      std::string name = stmt.substr(first, eq - first);
      while (!name.empty() && std::isspace(static_cast<unsigned char>(name.back()))) name.pop_back();
      if (name.empty()) throw InputError("statement without a name");
      in.expressions.push_back({name, stmt.substr(eq + 1)});
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return in;
}

inline InputFile read_input_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::ios_base::failure("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return read_input(ss.str());
}

}  // namespace polyopt
