#pragma once

#include "mu/exec.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace mu {

// A branch prediction: where to fetch from next and for how many steps the
// transaction may run before it must commit or roll back.
struct Prediction {
  Value target;
  uint64_t window = 0;
};

struct BranchEvent {
  uint64_t branch_pc = 0;
  uint64_t txn_id = 0;
  Value outcome; // predicted target on start, actual target on resolve
};

using History = std::vector<BranchEvent>;

// Prediction oracles may inspect the program and the branching history. The
// returned target must be either the branch's own target or its fall-through;
// anything else is a contract violation.
using Oracle =
    std::function<Prediction(const Program &, const History &, uint64_t pc)>;

struct OracleContractViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Oracle always_taken_oracle(uint64_t window);
Oracle always_not_taken_oracle(uint64_t window);

// Backward taken, forward not taken: predicts the smaller of fall-through
// and branch target, where the end marker counts as larger than any label.
Oracle btfnt_oracle(uint64_t window);

struct Txn {
  Config snapshot; // configuration at the branch
  uint64_t id = 0;
  uint64_t remaining = 0;
  Value predicted; // oracle semantics: predicted target; AM: mispredicted target
};

struct SpecConfig {
  uint64_t ctr = 0;
  Config cfg;
  std::vector<Txn> stack;
  History hist;
};

inline bool is_final(const SpecConfig &c) {
  return c.stack.empty() && is_final(c.cfg);
}

struct SpecStepOut {
  SpecConfig cfg;
  Trace obs;
};

// One step of the oracle-driven speculative machine. Commit/rollback of the
// zero-window transaction whose younger neighbours are all still live takes
// priority over everything else; a terminated inner configuration idles
// silently while the windows drain.
SpecStepOut step_spec(const Program &p, const SpecConfig &c, const Oracle &o,
                      Width w);

RunOut run_spec(const Program &p, Config init, const Oracle &o, Width w,
                uint64_t fuel = kDefaultFuel);

// Always-mispredict machine: no oracle, every branch starts a transaction
// down the wrong path and always rolls back. Only the innermost transaction
// ticks; nested windows are capped so an inner transaction never outlives
// what its parent has left.
struct AmConfig {
  uint64_t ctr = 0;
  Config cfg;
  std::vector<Txn> stack;
};

inline bool is_final(const AmConfig &c) {
  return c.stack.empty() && is_final(c.cfg);
}

struct AmStepOut {
  AmConfig cfg;
  Trace obs;
};

AmStepOut step_am(const Program &p, const AmConfig &c, uint64_t window,
                  Width w);

RunOut run_am(const Program &p, Config init, uint64_t window, Width w,
              uint64_t fuel = kDefaultFuel);

} // namespace mu
