#pragma once

#include "smt/solver.hpp"

#include <memory>
#include <string>

namespace smt {

struct FoundSolver {
  std::unique_ptr<Solver> solver; // null when nothing usable was found
  std::string how;                // human-readable description of the choice
};

// Picks a solver backend, in order of preference:
//   1. an explicit request ("enum" for built-in enumeration at the given
//      width, anything else as a shell command speaking SMT-LIB2 on
//      stdin/stdout),
//   2. the MUSNI_SOLVER environment variable, same interpretation,
//   3. a z3 binary on PATH, run as "z3 -in",
//   4. the bundled node wrapper around the z3 wasm build, when node is on
//      PATH and the wrapper's dependencies are installed.
FoundSolver find_solver(const std::string &prefer, int timeout_ms,
                        unsigned width);

} // namespace smt
