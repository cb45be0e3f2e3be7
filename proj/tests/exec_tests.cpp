#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "mu/exec.hpp"
#include "mu/parse.hpp"

using namespace mu;
using testutil::cfg;
using testutil::fixture;
using testutil::prog;

namespace {

const Width w64{64};

Trace tr(std::initializer_list<Obs> obs) { return obs; }

Obs load(uint64_t a) { return Obs::load(Value::of(a, w64)); }
Obs store_(uint64_t a) { return Obs::store(Value::of(a, w64)); }
Obs pc(uint64_t a) { return Obs::pc(Value::of(a, w64)); }
Obs pc_end() { return Obs::pc(Value::end()); }

} // namespace

TEST_CASE("expression evaluation reads registers and wraps") {
  RegFile r;
  r.set("y", 5);
  CHECK(eval_expr(*parse_expr("y + 3"), r, w64).bits() == 8);
  CHECK(eval_expr(*parse_expr("y < 6"), r, w64).bits() == 1);
  CHECK(eval_expr(*parse_expr("missing"), r, w64).bits() == 0); // default 0
  CHECK(eval_expr(*parse_expr("y + 5"), r, Width{3}).bits() == 2);
  CHECK(eval_expr(*parse_expr("-y"), r, Width{3}).bits() == 3);
}

TEST_CASE("bounds-check bypass program, in-bounds run") {
  Program p = parse_program(fixture("spectre.mu"));
  Config c = cfg(w64, {{"y", 1}, {"size", 2}, {"A", 16}, {"B", 100}},
                 {{17, 3}});
  RunOut out = run_nonspec(p, c, w64);

  // Branch falls through, then the two loads: A+y = 17, B + mem[17]*512.
  CHECK(out.trace == tr({pc(2), load(17), load(1636)}));
  CHECK(out.final_cfg.regs.get("z") == 1536);
  CHECK(out.final_cfg.regs.get("w") == 0);    // cell 1636 defaults to 0
  CHECK(out.final_cfg.regs.get("temp") == 0); // temp & 0
  CHECK(is_final(out.final_cfg));
  // Six instructions plus the silent off-the-end step.
  CHECK(out.steps == 7);
}

TEST_CASE("bounds-check bypass program, out-of-bounds run") {
  Program p = parse_program(fixture("spectre.mu"));
  Config c = cfg(w64, {{"y", 5}, {"size", 2}, {"A", 16}, {"B", 100}},
                 {{21, 3}});
  RunOut out = run_nonspec(p, c, w64);

  // The check holds: nothing beyond the taken branch is visible.
  CHECK(out.trace == tr({pc_end()}));
  CHECK(out.final_cfg.regs.get("z") == 0);
  CHECK(out.steps == 2);
}

TEST_CASE("stores write memory and expose the address") {
  Program p = prog("0: x <- 7\n"
                   "1: store x, 40 + 2\n"
                   "2: load y, 42\n");
  RunOut out = run_nonspec(p, cfg(w64), w64);
  CHECK(out.trace == tr({store_(42), load(42)}));
  CHECK(out.final_cfg.mem.get(42) == 7);
  CHECK(out.final_cfg.regs.get("y") == 7);
}

TEST_CASE("conditional assignment fires exactly when the guard is zero") {
  Program p = prog("0: x <-c? 9\n");
  RunOut hit = run_nonspec(p, cfg(w64, {{"c", 0}, {"x", 1}}), w64);
  CHECK(hit.final_cfg.regs.get("x") == 9);
  RunOut miss = run_nonspec(p, cfg(w64, {{"c", 5}, {"x", 1}}), w64);
  CHECK(miss.final_cfg.regs.get("x") == 1);
}

TEST_CASE("computed jumps normalize out-of-range targets to end") {
  Program p = prog("0: jmp t\n"
                   "1: skip\n"
                   "2: skip\n");
  RunOut in = run_nonspec(p, cfg(w64, {{"t", 2}}), w64);
  CHECK(in.trace == tr({pc(2)}));
  RunOut out = run_nonspec(p, cfg(w64, {{"t", 77}}), w64);
  CHECK(out.trace == tr({pc_end()}));
  CHECK(is_final(out.final_cfg));
}

TEST_CASE("branch fall-through at the last instruction ends silently") {
  Program p = prog("0: x <- a < 2\n"
                   "1: load y, a & 3\n"
                   "2: beqz x, end\n");
  // a < 2 makes x nonzero: fall through to the unmapped slot 3.
  RunOut fall = run_nonspec(p, cfg(w64, {{"a", 1}}), w64);
  CHECK(fall.trace == tr({load(1), pc(3)}));
  CHECK(is_final(fall.final_cfg));
  RunOut taken = run_nonspec(p, cfg(w64, {{"a", 6}}), w64);
  CHECK(taken.trace == tr({load(6), pc_end()}));
}

TEST_CASE("terminating loop") {
  Program p = prog("0: x <- x - 1\n"
                   "1: beqz x, 3\n"
                   "2: jmp 0\n"
                   "3: skip\n");
  RunOut out = run_nonspec(p, cfg(w64, {{"x", 3}}), w64);
  CHECK(out.trace ==
        tr({pc(2), pc(0), pc(2), pc(0), pc(3)}));
  CHECK(out.steps == 10);
  CHECK(out.final_cfg.regs.get("x") == 0);
}

TEST_CASE("fuel bounds divergent programs") {
  Program p = prog("0: jmp 0\n");
  CHECK_THROWS_AS(run_nonspec(p, cfg(w64), w64, 100), FuelExhausted);
}

TEST_CASE("single step from an unmapped slot terminates without observations") {
  Program p = prog("0: skip\n");
  Config c = cfg(w64);
  c.pc = Value::of(5, w64);
  StepOut s = step(p, c, w64);
  CHECK(s.cfg.pc.is_end());
  CHECK(s.obs.empty());
}

TEST_CASE("skip and barrier leave no trace") {
  Program p = prog("0: skip\n1: spbarr\n2: skip\n");
  RunOut out = run_nonspec(p, cfg(w64), w64);
  CHECK(out.trace.empty());
  CHECK(out.steps == 4);
}

TEST_CASE("narrow width truncates addresses and values") {
  Width w3{3};
  Program p = prog("0: x <- a + 6\n"
                   "1: load y, x\n");
  // a=5: x = 11 mod 8 = 3.
  Config c = cfg(w3, {{"a", 5}}, {{3, 7}});
  RunOut out = run_nonspec(p, c, w3);
  CHECK(out.trace == tr({Obs::load(Value::of(3, w3))}));
  CHECK(out.final_cfg.regs.get("y") == 7);
}
