#pragma once

#include "mu/config.hpp"
#include "mu/program.hpp"
#include "mu/trace.hpp"
#include "sym/expr.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace sym {

// Observation with symbolic payloads. Loads and stores carry the accessed
// address as an expression; sympc records the branch/jump condition that the
// executed path assumed (truthy means taken as emitted); pc targets and
// transaction markers stay concrete.
struct SymObs {
  enum class Kind { Load, Store, SymPc, Pc, Start, Commit, Rollback };

  Kind kind = Kind::Pc;
  SE se;        // Load, Store, SymPc
  Value val;    // Pc
  uint64_t id = 0; // Start, Commit, Rollback

  static SymObs load(SE a) { return {Kind::Load, std::move(a), {}, 0}; }
  static SymObs store(SE a) { return {Kind::Store, std::move(a), {}, 0}; }
  static SymObs sympc(SE c) { return {Kind::SymPc, std::move(c), {}, 0}; }
  static SymObs pc(Value v) { return {Kind::Pc, nullptr, v, 0}; }
  static SymObs start(uint64_t i) { return {Kind::Start, nullptr, {}, i}; }
  static SymObs commit(uint64_t i) { return {Kind::Commit, nullptr, {}, i}; }
  static SymObs rollback(uint64_t i) {
    return {Kind::Rollback, nullptr, {}, i};
  }

  bool is_marker() const {
    return kind == Kind::Start || kind == Kind::Commit ||
           kind == Kind::Rollback;
  }
};

using SymTrace = std::vector<SymObs>;

std::string to_string(const SymObs &o);
std::string to_string(const SymTrace &t);

// Concretize a symbolic trace under a valuation: sympc entries are dropped,
// load/store addresses are evaluated, everything else is already concrete.
mu::Trace concretize(const SymTrace &t, const Valuation &v, Width w);

// All sympc payloads in order; their conjunction is the path condition.
std::vector<SE> path_condition(const SymTrace &t);

struct SymConfig {
  Value pc;
  SymRegs regs;
  SM mem;

  static SymConfig initial(SM m) { return {Value{}, {}, std::move(m)}; }
};

bool is_final(const SymConfig &c);

struct SymStepOut {
  SymConfig cfg;
  SymTrace obs;
};

// Non-speculative symbolic step: fans out on branches whose condition did not
// fold to a number and on jumps to computed targets. Successors appear in a
// fixed order (branch taken first, jump targets ascending then termination).
std::vector<SymStepOut> step_sym(const mu::Program &p, const SymConfig &c,
                                 Width w);

// Always-mispredict speculation over symbolic configurations.
struct SymTxn {
  SymConfig snapshot;
  uint64_t id = 0;
  uint64_t remaining = 0;
  Value predicted; // the mispredicted target this transaction is following
};

struct SymAmConfig {
  uint64_t ctr = 0;
  SymConfig cfg;
  std::vector<SymTxn> stack;

  static SymAmConfig initial(SM m) {
    return {0, SymConfig::initial(std::move(m)), {}};
  }
};

bool is_final(const SymAmConfig &c);

struct SymAmStepOut {
  SymAmConfig cfg;
  SymTrace obs;
};

std::vector<SymAmStepOut> step_sym_am(const mu::Program &p,
                                      const SymAmConfig &c, uint64_t window,
                                      Width w);

// Path exploration.
enum class Feasibility { Sat, Unsat, Unknown };

// Receives the path conjuncts so far (the last entry is the newly added one)
// and decides whether the path is worth following.
using PathPruner = std::function<Feasibility(const std::vector<SE> &)>;

Feasibility assume_feasible(const std::vector<SE> &);

struct ExploreLimits {
  uint64_t max_paths = 25;
  uint64_t max_steps = 10000;
};

struct SymRun {
  SymTrace trace;
  SymConfig final_cfg;
  std::vector<SE> conjuncts; // non-constant path conjuncts, in order
};

struct ExploreOut {
  std::vector<SymRun> runs;
  bool complete = true;       // every feasible path was fully enumerated
  bool pruned_unknown = false; // some path was dropped on an Unknown verdict
};

// Depth-first enumeration of all always-mispredict paths of p under the given
// speculative window. Paths whose condition the pruner reports Unsat are
// dropped silently; Unknown also drops the path but poisons completeness.
ExploreOut explore(const mu::Program &p, uint64_t window, Width w,
                   const ExploreLimits &limits, const PathPruner &pruner);

} // namespace sym
