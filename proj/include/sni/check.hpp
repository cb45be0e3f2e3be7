#pragma once

#include "mu/config.hpp"
#include "mu/program.hpp"
#include "mu/trace.hpp"
#include "smt/solver.hpp"
#include "sym/exec.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sni {

enum class Verdict { Secure, Insecure, Inconclusive };

const char *verdict_str(Verdict v);

// One side of a counterexample pair: an initial assignment and the
// speculative trace it produces.
struct WitnessSide {
  std::map<std::string, uint64_t> regs;
  std::map<uint64_t, uint64_t> cells;
  mu::Trace am_trace;
};

struct Witness {
  enum class Kind { Memory, Control };

  std::size_t run_index = 0; // which explored path
  Kind kind = Kind::Memory;
  // Index into the speculative projection of that path: the first
  // observation whose addresses differ (Memory) or the branch condition the
  // two sides resolve differently (Control).
  std::size_t position = 0;
  WitnessSide first, second;
};

struct CheckOptions {
  uint64_t window = 200;
  mu::Width width{64};
  sym::ExploreLimits limits{};
  bool prune_with_solver = true;
  // Extra initial-memory addresses to read back from models, so witnesses
  // can be replayed concretely when the program's footprint is known.
  std::vector<uint64_t> probe_cells;
};

struct CheckOut {
  Verdict verdict = Verdict::Inconclusive;
  std::optional<Witness> witness;
  uint64_t paths = 0;
  uint64_t solver_queries = 0;
  bool explored_all = true;
  std::string note;
};

// Decides whether the program's speculative traces reveal more than its
// non-speculative traces to a policy-level observer, by checking one
// self-composed satisfiability query per potential leak: a memory-access
// disparity per path, and a branch-resolution disparity per speculatively
// executed branch. Any satisfiable query yields a concrete witness pair.
CheckOut check_sni(const mu::Program &p, const mu::Policy &policy,
                   smt::Solver &solver, const CheckOptions &opts);

// Path pruner that asks the solver whether the conjuncts are satisfiable.
// queries, when non-null, is incremented per solver call.
sym::PathPruner solver_pruner(smt::Solver &solver, mu::Width w,
                              uint64_t *queries);

} // namespace sni
