#pragma once

#include "smt/term.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace smt {

enum class Sat { Sat, Unsat, Unknown };

struct Result {
  Sat sat = Sat::Unknown;
  std::map<std::string, uint64_t> model; // eval label -> value (Sat only)
  std::string diag; // raw solver output or failure note, for reporting
};

class Solver {
public:
  virtual ~Solver() = default;
  virtual Result check(const Query &q) = 0;
  virtual std::string describe() const = 0;
};

// Parse a solver's textual response to to_smtlib(q): a sat/unsat/unknown
// token followed, when sat, by a get-value echo. Tolerates leading warning
// lines. Accepts #x..., #b..., (_ bvN W), true and false as values.
Result parse_response(const std::string &text);

// Runs `/bin/sh -c command` per query, feeding SMT-LIB2 on stdin and reading
// the response from stdout. A query that overruns the timeout gets killed
// and reported Unknown.
class ExternalSolver : public Solver {
public:
  ExternalSolver(std::string command, int timeout_ms = 30000)
      : command_(std::move(command)), timeout_ms_(timeout_ms) {}

  Result check(const Query &q) override;
  std::string describe() const override { return "external: " + command_; }

private:
  std::string command_;
  int timeout_ms_;
};

} // namespace smt
