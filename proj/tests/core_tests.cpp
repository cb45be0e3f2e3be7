#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "mu/parse.hpp"
#include "mu/program.hpp"
#include "mu/trace.hpp"
#include "mu/value.hpp"

#include <algorithm>

using namespace mu;
using testutil::fixture;
using testutil::prog;

TEST_CASE("width mask and truncation") {
  Width w3{3};
  CHECK(w3.mask() == 7);
  CHECK(w3.trunc(8) == 0);
  CHECK(w3.trunc(9) == 1);
  Width w64{64};
  CHECK(w64.mask() == ~0ull);
  CHECK(w64.trunc(~0ull) == ~0ull);
}

TEST_CASE("word operations wrap and compare") {
  Width w{3};
  CHECK(apply_bin(BinOp::Add, 6, 5, w) == 3);
  CHECK(apply_bin(BinOp::Sub, 1, 3, w) == 6);
  CHECK(apply_bin(BinOp::Mul, 3, 5, w) == 7);
  CHECK(apply_bin(BinOp::And, 6, 3, w) == 2);
  CHECK(apply_bin(BinOp::Or, 4, 1, w) == 5);
  CHECK(apply_bin(BinOp::Xor, 7, 5, w) == 2);
  CHECK(apply_bin(BinOp::Shl, 1, 2, w) == 4);
  CHECK(apply_bin(BinOp::Shl, 1, 3, w) == 0); // shift by full width
  CHECK(apply_bin(BinOp::Shr, 6, 1, w) == 3);
  CHECK(apply_bin(BinOp::Shr, 6, 9, w) == 0);
  CHECK(apply_bin(BinOp::Lt, 2, 3, w) == 1);
  CHECK(apply_bin(BinOp::Lt, 3, 3, w) == 0);
  CHECK(apply_bin(BinOp::Le, 3, 3, w) == 1);
  CHECK(apply_bin(BinOp::Eq, 5, 5, w) == 1);
  CHECK(apply_bin(BinOp::Ne, 5, 5, w) == 0);
  CHECK(apply_un(UnOp::Neg, 1, w) == 7);
  CHECK(apply_un(UnOp::Neg, 0, w) == 0);
  CHECK(apply_un(UnOp::Not, 0, w) == 7);

  // 64-bit wrap-around.
  Width w64{64};
  CHECK(apply_bin(BinOp::Add, ~0ull, 1, w64) == 0);
  CHECK(apply_bin(BinOp::Mul, 1ull << 63, 2, w64) == 0);
}

TEST_CASE("end marker is distinct from every word") {
  Width w{64};
  CHECK(Value::end().is_end());
  CHECK(Value::end() == Value::end());
  CHECK(Value::end() != Value::of(0, w));
  CHECK(Value::of(5, w) == Value::of(5, w));
  CHECK(Value::of(5, w) != Value::of(6, w));
  CHECK(Value::end().str() == "end");
  CHECK(Value::of(12, w).str() == "12");
  CHECK(Value::of(9, Width{3}).bits() == 1); // truncated at construction
}

TEST_CASE("expression precedence") {
  // Loosest to tightest: comparisons; | ^; &; << >>; + -; *; unary.
  CHECK(print_expr(*parse_expr("a + b * 2")) == "a + b * 2");
  CHECK(print_expr(*parse_expr("(a + b) * 2")) == "(a + b) * 2");
  CHECK(print_expr(*parse_expr("a & 3 + 1")) == "a & 3 + 1");
  CHECK(expr_equal(*parse_expr("a & 3 + 1"), *parse_expr("a & (3 + 1)")));
  CHECK(expr_equal(*parse_expr("a & b | c"), *parse_expr("(a & b) | c")));
  CHECK(expr_equal(*parse_expr("x << 2 + 1"), *parse_expr("x << (2 + 1)")));
  CHECK(expr_equal(*parse_expr("a < b | c"), *parse_expr("a < (b | c)")));
  CHECK(expr_equal(*parse_expr("- -x"), *Expr::make_un(
                                            UnOp::Neg, Expr::make_un(UnOp::Neg,
                                                                     Expr::make_reg("x")))));
  CHECK(print_expr(*parse_expr("~x & 1")) == "~x & 1");
  CHECK(parse_expr("0x1f")->num == 31);

  // Subtraction associates left.
  Width w{64};
  RegFile r;
  // (8 - 3) - 2, not 8 - (3 - 2)
  ExprPtr e = parse_expr("8 - 3 - 2");
  CHECK(e->bin == BinOp::Sub);
  CHECK(e->b->num == 2);
}

TEST_CASE("expression print/parse round trip") {
  const char *cases[] = {
      "a + b * 2",      "(a + b) * 2",   "A + y",          "z * 512",
      "temp & w",       "y < size",      "a | m",          "(a | m) & 3",
      "x << 2 >> 1",    "-x + ~y",       "a != b",         "a <= b",
      "a ^ b & c",      "1 + 2 + 3 - 4", "B + (x << 2)",
  };
  for (const char *c : cases) {
    ExprPtr once = parse_expr(c);
    ExprPtr twice = parse_expr(print_expr(*once));
    CHECK_MESSAGE(expr_equal(*once, *twice), c);
  }
}

TEST_CASE("program parse and print round trip") {
  std::string text = "0: x <- y < size\n"
                     "1: beqz x, end\n"
                     "2: load z, A + y\n"
                     "3: z <- z * 512\n"
                     "4: load w, B + z\n"
                     "5: temp <- temp & w\n";
  Program p = parse_program(text);
  REQUIRE(p.size() == 6);
  CHECK(p[0].kind == Instr::Kind::Assign);
  CHECK(p[1].kind == Instr::Kind::Beqz);
  CHECK(p[1].reg == "x");
  CHECK(p[1].target.is_end());
  CHECK(p[2].kind == Instr::Kind::Load);
  CHECK(p[2].reg == "z");
  CHECK(print_program(p) == text);
}

TEST_CASE("fixture programs parse and survive a round trip") {
  const char *names[] = {
      "spectre.mu",
      "spectre_fence.mu",
      "spectre_slh.mu",
      "corpus/spectre.mu",
      "corpus/spectre_slh.mu",
      "corpus/nested_benign.mu",
      "corpus/slh_index_only.mu",
  };
  for (const char *n : names) {
    Program p = parse_program(fixture(n));
    CHECK_NOTHROW(check_well_formed(p, Width{64}));
    Program again = parse_program(print_program(p));
    CHECK_MESSAGE(print_program(p) == print_program(again), n);
  }
}

TEST_CASE("all instruction forms parse") {
  Program p = prog("0: skip\n"
                   "1: spbarr\n"
                   "2: x <- 1\n"
                   "3: x <-c? y + 1\n"
                   "4: load r, a + 4\n"
                   "5: store r, 0x10\n"
                   "6: jmp 2 + 2\n"
                   "7: beqz x, 2\n");
  CHECK(p[0].kind == Instr::Kind::Skip);
  CHECK(p[1].kind == Instr::Kind::Spbarr);
  CHECK(p[3].kind == Instr::Kind::CondAssign);
  CHECK(p[3].cond->reg == "c");
  CHECK(p[5].kind == Instr::Kind::Store);
  CHECK(p[5].e->num == 16);
  CHECK(p[6].kind == Instr::Kind::Jmp);
  CHECK(p[7].target.bits() == 2);
}

TEST_CASE("parse errors carry line numbers") {
  auto fails_at = [](const std::string &text, size_t line) {
    try {
      parse_program(text);
      FAIL_CHECK(text);
    } catch (const ParseError &e) {
      CHECK(e.line == line);
    }
  };
  fails_at("1: skip\n", 1);                 // labels start at 0
  fails_at("0: skip\n0: skip\n", 2);        // labels count up
  fails_at("0: skip extra\n", 1);           // trailing input
  fails_at("0: load end, 3\n", 1);          // keyword as register
  fails_at("0: beqz x, y\n", 1);            // target must be label or end
  fails_at("0: x <- (1 + 2\n", 1);          // unbalanced parens
  fails_at("0: x <- 0x\n", 1);              // bad hex literal
  fails_at("", 0);                          // no instructions
  fails_at("# only a comment\n", 1);
}

TEST_CASE("well-formedness rejects degenerate programs") {
  CHECK_THROWS_AS(check_well_formed({}, Width{64}), WellFormedError);

  // 8 instructions cannot be addressed with 3-bit labels (end = 7 is the cap).
  Program big(8, Instr::skip());
  CHECK_THROWS_AS(check_well_formed(big, Width{3}), WellFormedError);
  Program ok(7, Instr::skip());
  CHECK_NOTHROW(check_well_formed(ok, Width{3}));

  // A branch to its own fall-through could never be observed branching.
  Program p = prog("0: beqz x, 1\n1: skip\n");
  CHECK_THROWS_AS(check_well_formed(p, Width{64}), WellFormedError);
  // Targeting itself or anywhere else is fine.
  CHECK_NOTHROW(check_well_formed(prog("0: beqz x, 0\n1: skip\n"), Width{64}));
  CHECK_NOTHROW(check_well_formed(prog("0: beqz x, end\n1: skip\n"), Width{64}));
}

TEST_CASE("register collection and liveness") {
  Program p = parse_program(fixture("spectre.mu"));
  std::vector<std::string> regs = program_regs(p);
  std::vector<std::string> expect = {"A", "B", "size", "temp", "w", "x", "y", "z"};
  CHECK(regs == expect);

  // x, z and w are written before any read; the rest feed the first use.
  std::vector<std::string> live = live_in_regs(p);
  std::sort(live.begin(), live.end());
  std::vector<std::string> expect_live = {"A", "B", "size", "temp", "y"};
  CHECK(live == expect_live);
}

TEST_CASE("policy parsing") {
  Policy p = parse_policy(fixture("spectre.pol"));
  CHECK(p.regs == std::set<std::string>{"A", "B", "size", "y"});
  CHECK(p.mems.empty());

  Policy q = parse_policy("low mem 0\nlow mem 0x10\nlow reg a\n# c\n");
  CHECK(q.mems == std::set<uint64_t>{0, 16});
  CHECK(q.regs == std::set<std::string>{"a"});

  CHECK_THROWS_AS(parse_policy("high reg a\n"), ParseError);
  CHECK_THROWS_AS(parse_policy("low reg 3\n"), ParseError);
  CHECK_THROWS_AS(parse_policy("low mem a\n"), ParseError);
  CHECK_THROWS_AS(parse_policy("low reg a b\n"), ParseError);
}

TEST_CASE("indistinguishability is an equivalence that ignores secrets") {
  Width w{64};
  Policy pol;
  pol.regs = {"y"};
  pol.mems = {0};

  auto mk = [&](uint64_t y, uint64_t secret_reg, uint64_t m0, uint64_t m9) {
    Config c = testutil::cfg(w, {{"y", y}, {"s", secret_reg}}, {{0, m0}, {9, m9}});
    return c;
  };

  Config a = mk(1, 2, 3, 4);
  Config b = mk(1, 99, 3, 77); // differs only in secrets
  Config c = mk(2, 2, 3, 4);   // differs in the public register
  Config d = mk(1, 2, 8, 4);   // differs in the public cell

  CHECK(indistinguishable(a, a, pol));
  CHECK(indistinguishable(a, b, pol));
  CHECK(indistinguishable(b, a, pol)); // symmetric
  CHECK_FALSE(indistinguishable(a, c, pol));
  CHECK_FALSE(indistinguishable(a, d, pol));

  // Transitivity on a chain of secret-only edits.
  Config e = mk(1, 5, 3, 123);
  CHECK(indistinguishable(b, e, pol));
  CHECK(indistinguishable(a, e, pol));

  // The empty policy relates everything.
  CHECK(indistinguishable(a, c, Policy{}));
}

TEST_CASE("register and memory maps erase zero entries") {
  RegFile r;
  r.set("x", 5);
  r.set("x", 0);
  CHECK(r.slots.empty());
  CHECK(r.get("x") == 0);

  Memory m;
  m.set(3, 1);
  m.set(3, 0);
  CHECK(m.cells.empty());
  CHECK(m.get(3) == 0);

  // Equality of maps is equality of total functions.
  RegFile a, b;
  a.set("x", 0);
  CHECK(a == b);
}

TEST_CASE("observation text format") {
  Width w{64};
  CHECK(to_string(Obs::load(Value::of(9, w))) == "load 9");
  CHECK(to_string(Obs::store(Value::of(3, w))) == "store 3");
  CHECK(to_string(Obs::pc(Value::end())) == "pc end");
  CHECK(to_string(Obs::start(2)) == "start 2");
  CHECK(to_string(Obs::commit(0)) == "commit 0");
  CHECK(to_string(Obs::rollback(1)) == "rollback 1");
  Trace t = {Obs::pc(Value::of(2, w)), Obs::load(Value::of(7, w))};
  CHECK(to_string(t) == "pc 2\nload 7\n");
}
