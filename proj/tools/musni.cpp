#include "mu/exec.hpp"
#include "mu/parse.hpp"
#include "mu/spec.hpp"
#include "smt/find_solver.hpp"
#include "sni/brute.hpp"
#include "sni/check.hpp"
#include "sym/exec.hpp"
#include "x86/frontend.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

constexpr int kExitSecure = 0;
constexpr int kExitInsecure = 1;
constexpr int kExitInconclusive = 2;
constexpr int kExitError = 3;

std::string read_input(const std::string &path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path);
  if (!f)
    throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

bool ends_with(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

struct ProgramArgs {
  std::string path;
  bool x86 = false;
  bool permissive = false;
  std::string symbols;

  void attach(CLI::App *cmd) {
    cmd->add_option("program", path,
                    "program file ('-' for stdin); .s files are treated as "
                    "x86 assembly")
        ->required();
    cmd->add_flag("--x86", x86, "treat the input as AT&T x86 assembly");
    cmd->add_flag("--permissive", permissive,
                  "lower unsupported x86 mnemonics to skip (unsound)");
    cmd->add_option("--symbols", symbols,
                    "data symbol placement file for x86 input "
                    "('name = address' lines)");
  }

  mu::Program load(mu::Width w) const {
    std::string text = read_input(path);
    mu::Program p;
    if (x86 || ends_with(path, ".s") || ends_with(path, ".S")) {
      x86::Options o;
      o.permissive = permissive;
      if (!symbols.empty())
        o.symbols = x86::parse_symbols(read_input(symbols));
      p = x86::translate(text, o).prog;
    } else {
      p = mu::parse_program(text);
    }
    mu::check_well_formed(p, w);
    return p;
  }
};

mu::Config parse_init(const std::vector<std::string> &inits, mu::Width w) {
  mu::Config c;
  auto apply = [&](const std::string &kv) {
    size_t eq = kv.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("bad --init '" + kv + "', expected name=value");
    std::string name = kv.substr(0, eq);
    uint64_t value = std::stoull(kv.substr(eq + 1), nullptr, 0);
    if (name.size() > 5 && name.rfind("mem[", 0) == 0 && name.back() == ']') {
      uint64_t addr = std::stoull(name.substr(4, name.size() - 5), nullptr, 0);
      c.mem.set(addr, w.trunc(value));
    } else {
      c.regs.set(name, w.trunc(value));
    }
  };
  for (const auto &arg : inits) {
    // Accept both repeated flags and comma-separated lists: --init y=5,size=2
    std::string item;
    std::istringstream ss(arg);
    while (std::getline(ss, item, ','))
      if (!item.empty())
        apply(item);
  }
  return c;
}

nlohmann::json witness_side_json(const sni::WitnessSide &s) {
  nlohmann::json j;
  j["regs"] = nlohmann::json::object();
  for (const auto &[k, v] : s.regs)
    j["regs"][k] = v;
  j["cells"] = nlohmann::json::object();
  for (const auto &[k, v] : s.cells)
    j["cells"][std::to_string(k)] = v;
  j["trace"] = nlohmann::json::array();
  for (const auto &o : s.am_trace)
    j["trace"].push_back(mu::to_string(o));
  return j;
}

nlohmann::json check_json(const sni::CheckOut &res) {
  nlohmann::json j;
  j["verdict"] = sni::verdict_str(res.verdict);
  j["pathsExplored"] = res.paths;
  j["solverQueries"] = res.solver_queries;
  j["exploredAll"] = res.explored_all;
  if (!res.note.empty())
    j["note"] = res.note;
  if (res.witness) {
    const auto &w = *res.witness;
    j["witness"] = {
        {"runIndex", w.run_index},
        {"kind", w.kind == sni::Witness::Kind::Memory ? "memory" : "control"},
        {"position", w.position},
        {"first", witness_side_json(w.first)},
        {"second", witness_side_json(w.second)},
    };
  }
  return j;
}

void write_json(const nlohmann::json &j, const std::string &path) {
  if (path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f)
    throw std::runtime_error("cannot write '" + path + "'");
  f << j.dump(2) << "\n";
}

void print_witness_text(const sni::Witness &w) {
  std::cout << "counterexample on path " << w.run_index << ": ";
  if (w.kind == sni::Witness::Kind::Memory)
    std::cout << "speculative access #" << w.position
              << " touches different addresses\n";
  else
    std::cout << "speculatively executed branch (observation #" << w.position
              << " of the suffix) resolves differently\n";
  auto side = [](const char *tag, const sni::WitnessSide &s) {
    std::cout << tag;
    bool first = true;
    for (const auto &[k, v] : s.regs) {
      std::cout << (first ? "" : ", ") << k << "=" << v;
      first = false;
    }
    for (const auto &[k, v] : s.cells) {
      std::cout << (first ? "" : ", ") << "mem[" << k << "]=" << v;
      first = false;
    }
    std::cout << "\n";
  };
  side("  input 1: ", w.first);
  side("  input 2: ", w.second);
  std::cout << "  trace 1:\n";
  for (const auto &o : w.first.am_trace)
    std::cout << "    " << mu::to_string(o) << "\n";
  std::cout << "  trace 2:\n";
  for (const auto &o : w.second.am_trace)
    std::cout << "    " << mu::to_string(o) << "\n";
}

int verdict_exit(sni::Verdict v) {
  switch (v) {
  case sni::Verdict::Secure:
    return kExitSecure;
  case sni::Verdict::Insecure:
    return kExitInsecure;
  case sni::Verdict::Inconclusive:
    return kExitInconclusive;
  }
  return kExitError;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"speculative non-interference checker"};
  app.require_subcommand(1);
  argv = app.ensure_utf8(argv);

  unsigned width_bits = 64;
  uint64_t window = 200;

  // check
  auto *check = app.add_subcommand(
      "check", "decide speculative non-interference, with witness on leak");
  ProgramArgs check_prog;
  check_prog.attach(check);
  std::string policy_path, solver_req, json_out;
  uint64_t max_paths = 25, max_steps = 10000, probe_cells = 0;
  int solver_timeout = 30000;
  bool no_prune = false;
  check->add_option("--policy", policy_path,
                    "policy file: 'low reg NAME' / 'low mem ADDR' lines")
      ->required();
  check->add_option("--window", window, "speculative window (default 200)");
  check->add_option("--width", width_bits, "word width in bits (default 64)");
  check->add_option("--max-paths", max_paths, "path exploration cap");
  check->add_option("--max-steps", max_steps, "per-path step cap");
  check->add_option("--solver", solver_req,
                    "solver: 'enum' or a shell command reading SMT-LIB2 on "
                    "stdin (default: auto-detect)");
  check->add_option("--solver-timeout", solver_timeout,
                    "per-query timeout in ms");
  check->add_option("--probe-cells", probe_cells,
                    "also report initial memory below this address in "
                    "witnesses");
  check->add_flag("--no-prune", no_prune,
                  "explore without per-branch satisfiability pruning");
  check->add_option("--json", json_out, "write the result as JSON to a file "
                                        "('-' for stdout)");

  // trace
  auto *trace = app.add_subcommand("trace", "run one input and print the "
                                            "observation trace");
  ProgramArgs trace_prog;
  trace_prog.attach(trace);
  std::string semantics = "nonspec", oracle_name = "btfnt";
  std::vector<std::string> inits;
  uint64_t fuel = 100000;
  trace->add_option("--semantics", semantics,
                    "nonspec | spec (oracle-driven) | am (always-mispredict)")
      ->check(CLI::IsMember({"nonspec", "spec", "am"}));
  trace->add_option("--oracle", oracle_name,
                    "prediction oracle for spec semantics")
      ->check(CLI::IsMember({"btfnt", "taken", "not-taken"}));
  trace->add_option("--window", window, "speculative window");
  trace->add_option("--width", width_bits, "word width in bits");
  trace->add_option("--init", inits,
                    "initial state, e.g. --init x=3 --init 'mem[4]=7'");
  trace->add_option("--fuel", fuel, "step limit");

  // explore
  auto *explore = app.add_subcommand(
      "explore", "enumerate symbolic always-mispredict paths");
  ProgramArgs explore_prog;
  explore_prog.attach(explore);
  explore->add_option("--window", window, "speculative window");
  explore->add_option("--width", width_bits, "word width in bits");
  explore->add_option("--max-paths", max_paths, "path exploration cap");
  explore->add_option("--max-steps", max_steps, "per-path step cap");
  explore->add_option("--solver", solver_req, "solver for path pruning");
  explore->add_option("--solver-timeout", solver_timeout,
                      "per-query timeout in ms");
  explore->add_flag("--no-prune", no_prune, "keep unsatisfiable paths");

  // brute
  auto *brute = app.add_subcommand(
      "brute", "exhaustive concrete cross-check over a small state box");
  ProgramArgs brute_prog;
  brute_prog.attach(brute);
  uint64_t mem_bound = 4, max_states = 1ull << 20;
  uint64_t brute_window = 2;
  unsigned brute_width = 3;
  brute->add_option("--policy", policy_path,
                    "policy file: 'low reg NAME' / 'low mem ADDR' lines")
      ->required();
  brute->add_option("--window", brute_window, "speculative window (default 2)");
  brute->add_option("--width", brute_width, "word width in bits (default 3)");
  brute->add_option("--mem-bound", mem_bound,
                    "vary initial memory cells below this address");
  brute->add_option("--fuel", fuel, "per-run step limit");
  brute->add_option("--max-states", max_states,
                    "refuse boxes larger than this");

  // print
  auto *print = app.add_subcommand("print", "parse (or translate) and print "
                                            "the core program");
  ProgramArgs print_prog;
  print_prog.attach(print);
  print->add_option("--width", width_bits, "word width in bits");

  try {
    app.parse(argc, argv);

    mu::Width w{width_bits};

    if (*check) {
      mu::Program p = check_prog.load(w);
      mu::Policy policy = mu::parse_policy(read_input(policy_path));
      auto found = smt::find_solver(solver_req, solver_timeout, width_bits);
      if (!found.solver) {
        std::cerr << "no solver available (install z3, set MUSNI_SOLVER, or "
                     "run npm install in tools/z3smt2)\n";
        return kExitInconclusive;
      }
      sni::CheckOptions opts;
      opts.window = window;
      opts.width = w;
      opts.limits.max_paths = max_paths;
      opts.limits.max_steps = max_steps;
      opts.prune_with_solver = !no_prune;
      for (uint64_t a = 0; a < probe_cells; ++a)
        opts.probe_cells.push_back(a);
      sni::CheckOut res = sni::check_sni(p, policy, *found.solver, opts);
      std::cout << sni::verdict_str(res.verdict) << "\n";
      std::cout << "paths: " << res.paths
                << (res.explored_all ? " (all explored)" : " (truncated)")
                << ", solver queries: " << res.solver_queries << " via "
                << found.how << "\n";
      if (!res.note.empty())
        std::cout << "note: " << res.note << "\n";
      if (res.witness)
        print_witness_text(*res.witness);
      if (!json_out.empty())
        write_json(check_json(res), json_out);
      return verdict_exit(res.verdict);
    }

    if (*trace) {
      mu::Program p = trace_prog.load(w);
      mu::Config init = parse_init(inits, w);
      mu::RunOut out;
      if (semantics == "nonspec") {
        out = mu::run_nonspec(p, init, w, fuel);
      } else if (semantics == "am") {
        out = mu::run_am(p, init, window, w, fuel);
      } else {
        mu::Oracle o = oracle_name == "taken" ? mu::always_taken_oracle(window)
                       : oracle_name == "not-taken"
                           ? mu::always_not_taken_oracle(window)
                           : mu::btfnt_oracle(window);
        out = mu::run_spec(p, init, o, w, fuel);
      }
      std::cout << mu::to_string(out.trace);
      return 0;
    }

    if (*explore) {
      mu::Program p = explore_prog.load(w);
      sym::ExploreLimits limits{max_paths, max_steps};
      sym::PathPruner pruner = sym::assume_feasible;
      smt::FoundSolver found;
      if (!no_prune) {
        found = smt::find_solver(solver_req, solver_timeout, width_bits);
        if (found.solver)
          pruner = sni::solver_pruner(*found.solver, w, nullptr);
        else
          std::cerr << "note: no solver found, keeping all paths\n";
      }
      sym::ExploreOut out = sym::explore(p, window, w, limits, pruner);
      for (size_t i = 0; i < out.runs.size(); ++i) {
        std::cout << "run " << i << ":\n";
        std::istringstream lines(sym::to_string(out.runs[i].trace));
        std::string line;
        while (std::getline(lines, line))
          std::cout << "  " << line << "\n";
      }
      std::cout << (out.complete ? "complete" : "truncated") << ", "
                << out.runs.size() << " run(s)\n";
      return 0;
    }

    if (*brute) {
      if (brute_width > 4 || mem_bound > 8) {
        std::cerr << "brute requires --width <= 4 and --mem-bound <= 8\n";
        return kExitError;
      }
      mu::Width bw{brute_width};
      mu::Program p = brute_prog.load(bw);
      mu::Policy policy = mu::parse_policy(read_input(policy_path));
      sni::BruteOptions opts;
      opts.window = brute_window;
      opts.width = bw;
      opts.mem_bound = mem_bound;
      opts.fuel = fuel;
      opts.max_states = max_states;
      sni::BruteOut res = sni::brute_sni(p, policy, opts);
      if (res.verdict == sni::BruteOut::Verdict::TooLarge) {
        std::cout << "INCONCLUSIVE\nstate box exceeds --max-states\n";
        return kExitInconclusive;
      }
      if (res.verdict == sni::BruteOut::Verdict::Insecure) {
        std::cout << "INSECURE\nchecked " << res.states << " state(s)\n";
        std::cout << "trace 1:\n" << mu::to_string(res.trace_first);
        std::cout << "trace 2:\n" << mu::to_string(res.trace_second);
        return kExitInsecure;
      }
      std::cout << "SECURE\nchecked " << res.states << " state(s)\n";
      return kExitSecure;
    }

    if (*print) {
      mu::Program p = print_prog.load(w);
      std::cout << mu::print_program(p);
      return 0;
    }
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitError;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
