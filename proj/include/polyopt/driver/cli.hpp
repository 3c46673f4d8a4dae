#pragma once

#include "polyopt/core/evaluate.hpp"
#include "polyopt/driver/optimize.hpp"
#include "polyopt/driver/resultant.hpp"
#include "polyopt/driver/scatter.hpp"
#include "polyopt/driver/settings.hpp"
#include "polyopt/driver/shift.hpp"
#include "polyopt/frontend/emitter.hpp"
#include "polyopt/frontend/input_file.hpp"
#include "polyopt/frontend/parser.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace polyopt {

// Exit codes of cli_run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInternal = 3;

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) parts.push_back(cur);
  return parts;
}

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

inline VarId lookup_symbol(const Symbols& symbols, const std::string& name) {
  const auto id = symbols.find(trim(name));
  if (!id) throw UsageError("unknown symbol '" + trim(name) + "'");
  return *id;
}

struct ScatterSpec {
  double lo = 0.0, hi = 0.0;
  Distribution distribution = Distribution::Log;
  std::size_t samples = 0;
};

inline ScatterSpec parse_scatter(const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 4) throw UsageError("--scatter expects lo:hi:log|lin:N");
  ScatterSpec s;
  try {
    s.lo = std::stod(parts[0]);
    s.hi = std::stod(parts[1]);
    s.samples = static_cast<std::size_t>(std::stoull(parts[3]));
  } catch (const std::exception&) {
    throw UsageError("--scatter expects lo:hi:log|lin:N");
  }
  if (parts[2] == "log")
    s.distribution = Distribution::Log;
  else if (parts[2] == "lin")
    s.distribution = Distribution::Lin;
  else
    throw UsageError("--scatter distribution must be log or lin");
  try {
    check_range(s.lo, s.hi, s.distribution);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return s;
}

inline std::string resultant_file(unsigned m, unsigned n) {
  const auto fx = resultant_fixture(m, n);
  std::ostringstream os;
  os << "# Sylvester resultant of degrees " << m << " and " << n << "\n";
  os << "symbols: ";
  for (std::size_t i = 0; i < fx.symbols.size(); ++i) os << (i ? ", " : "") << fx.symbols.name(static_cast<VarId>(i));
  os << "\nF =";
  std::size_t col = 3;
  bool first = true;
  for (const auto& t : fx.resultant.terms()) {
    std::string term = t.coeff < 0 ? " - " : (first ? " " : " + ");
    const Integer mag = abs_value(t.coeff);
    bool need_star = false;
    if (mag != 1 || t.monomial.is_constant()) {
      term += mag.str();
      need_star = true;
    }
    for (const auto& f : t.monomial.factors()) {
      term += (need_star ? "*" : "") + fx.symbols.name(f.var);
      if (f.exponent > 1) term += "^" + std::to_string(f.exponent);
      need_star = true;
    }
    if (col + term.size() > 78) {
      os << "\n   ";
      col = 3;
    }
    os << term;
    col += term.size();
    first = false;
  }
  os << ";\n";
  return os.str();
}

}  // namespace detail

// Command-line entry point. Code goes to `out` (or -o), statistics and messages to `err`.
inline int cli_run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"polyopt: turn polynomials into short evaluation programs"};
  app.set_version_flag("--version", "polyopt 1.0");
  int level = 0;
  std::string horner, direction, method, scheme, dialect = "plain", temp_name, bracket, shift_groups, scatter;
  std::string input_path, output_path, csv_path, emit_resultant;
  double cp = 0, mcts_time = 0, greedy_max_perc = 0, greedy_time = 0, time_limit = 0;
  std::size_t num_expand = 0, num_keep = 0, num_repeat = 0, greedy_min_num = 0;
  unsigned threads = 1;
  std::uint64_t seed = 0;
  bool stats = false, print_scheme = false, debug = false;

  app.add_option("-O", level, "Optimization level 0-3")->check(CLI::Range(0, 3));
  auto* o_horner = app.add_option("--horner", horner, "occurrence|mcts");
  auto* o_direction = app.add_option("--direction", direction, "forward|backward|forwardorbackward|forwardandbackward");
  auto* o_cp = app.add_option("--mcts-constant", cp, "UCT exploration constant");
  auto* o_expand = app.add_option("--mcts-num-expand", num_expand, "Tree expansions per search");
  auto* o_keep = app.add_option("--mcts-num-keep", num_keep, "Schemes kept for the final passes");
  auto* o_repeat = app.add_option("--mcts-num-repeat", num_repeat, "Independent trees");
  auto* o_mcts_time = app.add_option("--mcts-time-limit", mcts_time, "Seconds for the tree search");
  auto* o_threads = app.add_option("--threads", threads, "Threads for independent trees");
  auto* o_method = app.add_option("--method", method, "none|cse|greedy|csegreedy");
  auto* o_perc = app.add_option("--greedy-max-perc", greedy_max_perc, "Percentage of patterns applied per round");
  auto* o_min = app.add_option("--greedy-min-num", greedy_min_num, "Minimum patterns applied per round");
  auto* o_greedy_time = app.add_option("--greedy-time-limit", greedy_time, "Seconds for the greedy passes");
  auto* o_time = app.add_option("--time-limit", time_limit, "Seconds, split between search and greedy passes");
  app.add_flag("--stats", stats, "Print operation counts to stderr");
  app.add_option("--scheme", scheme, "Fixed Horner order, e.g. x,y,z");
  app.add_flag("--print-scheme", print_scheme, "Print the chosen Horner order");
  app.add_flag("--debug", debug, "Also print the instructions as substitutions");
  auto* o_seed = app.add_option("--seed", seed, "Random seed (default: $POLYOPT_SEED or 0)");
  app.add_option("--dialect", dialect, "plain|c|fortran");
  app.add_option("--temp-name", temp_name, "Array name for temporaries");
  app.add_option("--bracket", bracket, "Optimize the contents of brackets in this symbol together");
  app.add_option("--shift-groups", shift_groups, "Shift search groups: 'all' or x,y;z,w");
  app.add_option("--scatter", scatter, "Experiment lo:hi:log|lin:N over the UCT constant");
  app.add_option("--csv", csv_path, "CSV file for --scatter (default stdout)");
  app.add_option("--emit-resultant", emit_resultant, "Write the Sylvester resultant input M:N and exit");
  app.add_option("-o,--output", output_path, "Output file (default stdout)");
  app.add_option("input", input_path, "Input file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "polyopt: " << e.what() << "\n";
    return kExitUsage;
  }

  std::ofstream file_out;
  std::ostream* code_out = &out;
  auto open_output = [&]() {
    if (output_path.empty()) return;
    file_out.open(output_path);
    if (!file_out) throw std::ios_base::failure("cannot write '" + output_path + "'");
    code_out = &file_out;
  };

  try {
    if (!emit_resultant.empty()) {
      const auto parts = detail::split(emit_resultant, ':');
      unsigned m = 0, n = 0;
      try {
        if (parts.size() != 2) throw std::invalid_argument("format");
        m = static_cast<unsigned>(std::stoul(parts[0]));
        n = static_cast<unsigned>(std::stoul(parts[1]));
      } catch (const std::exception&) {
        throw detail::UsageError("--emit-resultant expects M:N");
      }
      std::string text;
      try {
        text = detail::resultant_file(m, n);
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(e.what());
      }
      open_output();
      *code_out << text;
      return kExitOk;
    }
    if (input_path.empty()) throw detail::UsageError("no input file given");

    OptimizerSettings s = OptimizerSettings::preset(static_cast<Level>(level));
    if (*o_horner) {
      const auto h = parse_horner(horner);
      if (!h) throw detail::UsageError("unknown --horner '" + horner + "'");
      s.horner = *h;
    }
    if (*o_direction) {
      const auto d = parse_direction(direction);
      if (!d) throw detail::UsageError("unknown --direction '" + direction + "'");
      s.direction = *d;
    }
    if (*o_method) {
      const auto m = parse_method(method);
      if (!m) throw detail::UsageError("unknown --method '" + method + "'");
      s.method = *m;
    }
    if (*o_cp) s.mcts.cp = cp;
    if (*o_expand) s.mcts.num_expand = num_expand;
    if (*o_keep) s.mcts.num_keep = num_keep;
    if (*o_repeat) s.mcts.num_repeat = num_repeat;
    if (*o_threads) s.mcts.threads = threads;
    if (*o_perc) s.greedy.max_percentage = greedy_max_perc;
    if (*o_min) s.greedy.min_number = greedy_min_num;
    if (*o_time) {
      if (time_limit < 0.0) throw detail::UsageError("--time-limit must not be negative");
      s.set_time_limit(time_limit);
    }
    if (*o_mcts_time) s.mcts.time_limit_seconds = mcts_time;
    if (*o_greedy_time) s.greedy.time_limit_seconds = greedy_time;
    if (*o_seed) {
      s.seed = seed;
    } else if (const char* env = std::getenv("POLYOPT_SEED")) {
      try {
        s.seed = std::stoull(env);
      } catch (const std::exception&) {
        throw detail::UsageError("POLYOPT_SEED is not a number");
      }
    }
    s.stats = stats;
    s.print_scheme = print_scheme;
    s.debug = debug;
    try {
      s.validate();
    } catch (const std::invalid_argument& e) {
      throw detail::UsageError(e.what());
    }

    EmitSettings es;
    if (dialect == "plain")
      es = EmitSettings::for_dialect(Dialect::Plain);
    else if (dialect == "c")
      es = EmitSettings::for_dialect(Dialect::C);
    else if (dialect == "fortran")
      es = EmitSettings::for_dialect(Dialect::Fortran);
    else
      throw detail::UsageError("unknown --dialect '" + dialect + "'");
    es.temp_array = temp_name;

    std::optional<detail::ScatterSpec> scatter_spec;
    if (!scatter.empty()) scatter_spec = detail::parse_scatter(scatter);

    const InputFile input = read_input_file(input_path);
    open_output();
    Emitter emitter(input.symbols, es);
    std::vector<ScatterRow> all_rows;

    for (const auto& source : input.expressions) {
      Polynomial p = parse(source, input.symbols);
      OptimizerSettings run = s;
      if (!scheme.empty()) {
        std::vector<VarId> order;
        for (const auto& name : detail::split(scheme, ',')) order.push_back(detail::lookup_symbol(input.symbols, name));
        run.scheme = order;
      }

      if (!shift_groups.empty()) {
        std::vector<std::vector<VarId>> groups;
        if (shift_groups == "all") {
          groups = single_group(input.symbols);
        } else {
          for (const auto& g : detail::split(shift_groups, ';')) {
            std::vector<VarId> group;
            for (const auto& name : detail::split(g, ',')) group.push_back(detail::lookup_symbol(input.symbols, name));
            groups.push_back(group);
          }
        }
        const auto shifted = shift_search(p, groups, input.symbols);
        for (const auto& rule : shifted.rules) {
          const std::string& target = input.symbols.name(rule.target);
          const bool negative = rule.amount.num < 0;
          const Rational magnitude = Rational::of(abs_value(rule.amount.num), rule.amount.den);
          std::string text = target + " -> " + target + (negative ? " - " : " + ");
          if (!rule.source)
            text += magnitude.str();
          else if (magnitude == Rational::of(1, 1))
            text += input.symbols.name(*rule.source);
          else
            text += magnitude.str() + "*" + input.symbols.name(*rule.source);
          *code_out << emitter.comment("shift " + text);
        }
        if (!shifted.rules.empty()) {
          *code_out << emitter.emit(shifted.unshift);
          if (s.stats) err << "*** STATS: shift " << count_operations(shifted.unshift, s.cost) << "\n";
          p = shifted.shifted;
        }
      }

      std::vector<Polynomial> outputs;
      std::vector<std::string> names;
      std::optional<VarId> outside;
      if (!bracket.empty()) {
        outside = detail::lookup_symbol(input.symbols, bracket);
        for (auto& b : bracket_by(p, *outside, source.name).brackets) {
          outputs.push_back(std::move(b.content));
          names.push_back(b.key);
        }
        if (run.scheme) {
          auto& seq = *run.scheme;
          seq.erase(std::remove(seq.begin(), seq.end(), *outside), seq.end());
        }
      } else {
        outputs.push_back(p);
        names.push_back(source.name);
      }

      if (scatter_spec) {
        auto rows = scatter_experiment(outputs, names, run, scatter_spec->samples, scatter_spec->lo, scatter_spec->hi,
                                       scatter_spec->distribution, run.seed);
        all_rows.insert(all_rows.end(), rows.begin(), rows.end());
        continue;
      }

      OptimizeResult result;
      try {
        result = optimize(outputs, names, run);
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(e.what());
      }
      if (!equivalent(outputs, result.program, 8)) throw std::logic_error("optimized program differs from its input");

      if (s.print_scheme && s.level != Level::O0)
        *code_out << emitter.comment("scheme " + to_string(result.order, input.symbols));
      *code_out << emitter.emit(result.program);
      if (outside) {
        std::string recombined;
        const std::string u = input.symbols.name(*outside);
        for (const auto& n : names) {
          const auto e = n.substr(source.name.size() + 1);
          std::string factor = e == "0" ? "" : (e == "1" ? u + "*" : u + "^" + e + "*");
          recombined += (recombined.empty() ? "" : " + ") + factor + n;
        }
        *code_out << emitter.comment(source.name + " = " + recombined);
      }
      if (s.debug) {
        std::istringstream lines(emitter.emit_debug_substitutions(result.program));
        for (std::string line; std::getline(lines, line);) *code_out << emitter.comment(line);
      }
      if (s.stats) {
        err << "*** STATS: original  " << result.before << "\n";
        err << "*** STATS: optimized " << result.after << "\n";
      }
      if (result.timed_out) err << "polyopt: time limit reached, returning the best program found\n";
    }

    if (scatter_spec) {
      if (csv_path.empty()) {
        write_csv(*code_out, all_rows);
      } else {
        std::ofstream csv(csv_path);
        if (!csv) throw std::ios_base::failure("cannot write '" + csv_path + "'");
        write_csv(csv, all_rows);
      }
    }
    return kExitOk;
  } catch (const detail::UsageError& e) {
    err << "polyopt: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::ios_base::failure& e) {
    err << "polyopt: " << e.what() << "\n";
    return kExitIo;
  } catch (const ParseError& e) {
    err << "polyopt: " << input_path << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const InputError& e) {
    err << "polyopt: " << input_path << ": " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "polyopt: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace polyopt
