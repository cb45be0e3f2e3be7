#pragma once

#include "mu/exec.hpp"
#include "mu/program.hpp"
#include "mu/spec.hpp"
#include "sni/project.hpp"
#include "sym/exec.hpp"

#include <random>
#include <string>
#include <vector>

// Random well-formed programs with forward-only control flow (every run
// terminates) plus the two semantic properties the randomized suites and the
// acceptance gate both drive: speculative traces must project back to the
// in-order trace, and symbolic always-mispredict runs must concretize to the
// concrete machine.

namespace propgen {

inline const mu::Width kWidth{3};
inline const char *kRegs[] = {"a", "b", "c"};

inline mu::ExprPtr gen_expr(std::mt19937_64 &rng, int depth) {
  if (depth == 0 || rng() % 3 == 0) {
    if (rng() % 2)
      return mu::Expr::make_num(rng() % 8);
    return mu::Expr::make_reg(kRegs[rng() % 3]);
  }
  if (rng() % 5 == 0)
    return mu::Expr::make_un(rng() % 2 ? mu::UnOp::Neg : mu::UnOp::Not,
                             gen_expr(rng, depth - 1));
  static const mu::BinOp ops[] = {
      mu::BinOp::Add, mu::BinOp::Sub, mu::BinOp::Mul, mu::BinOp::And,
      mu::BinOp::Or,  mu::BinOp::Xor, mu::BinOp::Shl, mu::BinOp::Shr,
      mu::BinOp::Lt,  mu::BinOp::Le,  mu::BinOp::Eq,  mu::BinOp::Ne};
  return mu::Expr::make_bin(ops[rng() % 12], gen_expr(rng, depth - 1),
                            gen_expr(rng, depth - 1));
}

// 3..7 instructions (3-bit labels), at most two branches, all branch and
// jump targets strictly forward.
inline mu::Program gen_program(std::mt19937_64 &rng) {
  size_t len = 3 + rng() % 5;
  mu::Program p;
  int branches = 0;
  for (size_t i = 0; i < len; ++i) {
    unsigned roll = rng() % 100;
    if (roll < 25 && branches < 2) {
      branches++;
      mu::Value tgt = mu::Value::end();
      uint64_t lo = i + 2; // the fall-through itself is not a legal target
      if (lo <= len && rng() % 3 != 0)
        tgt = mu::Value::of(lo + rng() % (len - lo + 1), kWidth);
      p.push_back(mu::Instr::beqz(kRegs[rng() % 3], tgt));
    } else if (roll < 33 && i + 1 < len) {
      uint64_t tgt = i + 1 + rng() % (len - i); // up to one past the end
      p.push_back(mu::Instr::jmp(mu::Expr::make_num(tgt)));
    } else if (roll < 55) {
      p.push_back(mu::Instr::assign(kRegs[rng() % 3], gen_expr(rng, 2)));
    } else if (roll < 65) {
      p.push_back(mu::Instr::cond_assign(kRegs[rng() % 3], gen_expr(rng, 1),
                                         gen_expr(rng, 2)));
    } else if (roll < 80) {
      p.push_back(mu::Instr::load(kRegs[rng() % 3], gen_expr(rng, 1)));
    } else if (roll < 90) {
      p.push_back(mu::Instr::store(kRegs[rng() % 3], gen_expr(rng, 1)));
    } else if (roll < 95) {
      p.push_back(mu::Instr::spbarr());
    } else {
      p.push_back(mu::Instr::skip());
    }
  }
  return p;
}

inline mu::Config gen_config(std::mt19937_64 &rng, bool zero) {
  mu::Config c;
  c.pc = mu::Value::of(0, kWidth);
  if (!zero) {
    for (const char *r : kRegs)
      c.regs.set(r, rng() % 8);
    for (uint64_t a = 0; a < 8; ++a)
      c.mem.set(a, rng() % 8);
  }
  return c;
}

// Runs all four speculative machines and compares each against the in-order
// run: erasing the rolled-back spans must give back the in-order trace, the
// final configuration must coincide, and the two projections must partition
// the non-marker observations. Returns the first violation, "" when clean.
inline std::string projection_property(const mu::Program &p,
                                       const mu::Config &init,
                                       uint64_t window) {
  mu::RunOut plain = mu::run_nonspec(p, init, kWidth);

  struct Machine {
    const char *name;
    mu::RunOut out;
  };
  std::vector<Machine> machines;
  machines.push_back(
      {"always-taken",
       mu::run_spec(p, init, mu::always_taken_oracle(window), kWidth)});
  machines.push_back(
      {"always-not-taken",
       mu::run_spec(p, init, mu::always_not_taken_oracle(window), kWidth)});
  machines.push_back(
      {"btfnt", mu::run_spec(p, init, mu::btfnt_oracle(window), kWidth)});
  machines.push_back(
      {"always-mispredict", mu::run_am(p, init, window, kWidth)});

  for (const auto &m : machines) {
    mu::Trace nse = sni::project_nonspec(m.out.trace);
    if (nse != plain.trace)
      return std::string(m.name) + ": committed projection diverges";
    if (!(m.out.final_cfg == plain.final_cfg))
      return std::string(m.name) + ": final configuration diverges";
    size_t non_markers = 0;
    for (const auto &o : m.out.trace)
      if (!o.is_marker())
        non_markers++;
    if (nse.size() + sni::project_spec(m.out.trace).size() != non_markers)
      return std::string(m.name) + ": projections do not partition the trace";
  }
  return "";
}

// Samples initial states, finds the one symbolic path whose assumptions the
// state satisfies, and compares that path's concretization against the
// concrete always-mispredict run. Returns the first violation, "" when clean.
inline std::string concretization_property(const mu::Program &p,
                                           uint64_t window,
                                           std::mt19937_64 &rng,
                                           int samples = 24) {
  sym::ExploreLimits limits;
  limits.max_paths = 256;
  limits.max_steps = 50000;
  sym::ExploreOut ex =
      sym::explore(p, window, kWidth, limits, sym::assume_feasible);
  if (!ex.complete)
    return "exploration hit a limit";

  for (int s = 0; s < samples; ++s) {
    sym::Valuation v;
    mu::Config init;
    init.pc = mu::Value::of(0, kWidth);
    for (const char *r : kRegs) {
      uint64_t val = rng() % 8;
      v.syms[r] = val;
      init.regs.set(r, val);
    }
    for (uint64_t a = 0; a < 8; ++a) {
      uint64_t val = rng() % 8;
      v.cells[a] = val;
      init.mem.set(a, val);
    }

    const sym::SymRun *match = nullptr;
    for (const auto &run : ex.runs) {
      bool sat = true;
      for (const auto &c : run.conjuncts)
        if (sym::eval(c, v, kWidth) == 0) {
          sat = false;
          break;
        }
      if (!sat)
        continue;
      if (match)
        return "two symbolic paths accept the same input";
      match = &run;
    }
    if (!match)
      return "no symbolic path accepts the input";

    mu::Trace got = mu::run_am(p, init, window, kWidth).trace;
    if (sym::concretize(match->trace, v, kWidth) != got)
      return "concretized trace diverges from the concrete machine";
  }
  return "";
}

} // namespace propgen
