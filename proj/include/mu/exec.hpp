#pragma once

#include "mu/config.hpp"
#include "mu/program.hpp"
#include "mu/trace.hpp"

#include <cstdint>
#include <stdexcept>

namespace mu {

struct FuelExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Value eval_expr(const Expr &e, const RegFile &regs, Width w);

struct StepOut {
  Config cfg;
  Trace obs;
};

// One in-order step. Reaching an unmapped instruction slot sets the pc to
// end silently. Precondition: !is_final(cfg).
StepOut step(const Program &p, const Config &cfg, Width w);

struct RunOut {
  Trace trace;
  Config final_cfg;
  uint64_t steps = 0;
};

inline constexpr uint64_t kDefaultFuel = 100000;

// Runs to termination; throws FuelExhausted if the program does not reach a
// final configuration within the step budget.
RunOut run_nonspec(const Program &p, Config init, Width w,
                   uint64_t fuel = kDefaultFuel);

} // namespace mu
