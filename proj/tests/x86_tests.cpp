#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "helpers.hpp"
#include "mu/exec.hpp"
#include "mu/parse.hpp"
#include "mu/spec.hpp"
#include "x86/frontend.hpp"

#include <algorithm>

using namespace x86;
using testutil::fixture;

namespace {

Options layout() {
  Options o;
  o.symbols = parse_symbols(fixture("layout.sym"));
  return o;
}

size_t count_kind(const mu::Program &p, mu::Instr::Kind k) {
  return static_cast<size_t>(std::count_if(
      p.begin(), p.end(), [&](const mu::Instr &i) { return i.kind == k; }));
}

} // namespace

TEST_CASE("symbol placement files parse") {
  auto syms = parse_symbols(fixture("layout.sym"));
  CHECK(syms.at("size") == 64);
  CHECK(syms.at("y") == 72);
  CHECK(syms.at("k") == 80);
  CHECK(syms.at("temp") == 88);
  CHECK(syms.at("A") == 1024);
  CHECK(syms.at("B") == 65536);

  CHECK(parse_symbols("X = 0x10 # hex\n").at("X") == 16);
  CHECK(parse_symbols("# nothing\n\n").empty());
  CHECK_THROWS_AS(parse_symbols("X 16\n"), TranslateError);
}

TEST_CASE("unprotected bounds-check bypass translates to the expected core") {
  LowerOut out = translate(fixture("spectre.s"), layout());
  CHECK(mu::print_program(out.prog) == "0: load rax, 64\n"
                                       "1: load rbx, 72\n"
                                       "2: cc0 <- rbx < rax\n"
                                       "3: beqz cc0, end\n"
                                       "4: load rax, 1024 + rbx\n"
                                       "5: rax <- rax << 9\n"
                                       "6: load rax, 65536 + rax\n"
                                       "7: load tmp0, 88\n"
                                       "8: tmp1 <- tmp0 & rax\n"
                                       "9: store tmp1, 88\n");
  CHECK(out.label_pos.at("END") == 10);
  CHECK_NOTHROW(mu::check_well_formed(out.prog, mu::Width{64}));
}

TEST_CASE("hardened bounds-check bypass translates to the expected core") {
  LowerOut out = translate(fixture("spectre_slh.s"), layout());
  CHECK(mu::print_program(out.prog) ==
        "0: load rax, 64\n"
        "1: load rbx, 72\n"
        "2: rdx <- 0\n"
        "3: cc0 <- rbx < rax\n"
        "4: beqz cc0, end\n"
        "5: cc1 <- rbx < rax\n"
        "6: rdx <-cc1? 18446744073709551615\n"
        "7: load rax, 1024 + rbx\n"
        "8: rax <- rax << 9\n"
        "9: rax <- rax | rdx\n"
        "10: load rax, 65536 + rax\n"
        "11: rax <- rax | rdx\n"
        "12: load tmp0, 88\n"
        "13: tmp1 <- tmp0 & rax\n"
        "14: store tmp1, 88\n");
  CHECK(out.label_pos.at("END") == 15);
  CHECK_NOTHROW(mu::check_well_formed(out.prog, mu::Width{64}));
}

TEST_CASE("index-only hardening of a nested compare translates as written") {
  LowerOut out = translate(fixture("kocher10_slh_o2.s"), layout());
  CHECK(mu::print_program(out.prog) ==
        "0: load rax, 64\n"
        "1: load rbx, 72\n"
        "2: rdx <- 0\n"
        "3: cc0 <- rbx < rax\n"
        "4: beqz cc0, end\n"
        "5: cc1 <- rbx < rax\n"
        "6: rdx <-cc1? 18446744073709551615\n"
        "7: rbx <- rbx | rdx\n"
        "8: load rcx, 80\n"
        "9: load tmp0, 1024 + rbx\n"
        "10: cc2 <- rcx = tmp0\n"
        "11: beqz cc2, end\n"
        "12: cc3 <- rcx = tmp0\n"
        "13: rdx <-cc3? 18446744073709551615\n"
        "14: load rcx, 65536\n"
        "15: load tmp1, 88\n"
        "16: tmp2 <- tmp1 & rcx\n"
        "17: store tmp2, 88\n"
        "18: jmp 19\n");
  CHECK(out.label_pos.at("END") == 19);
  CHECK_NOTHROW(mu::check_well_formed(out.prog, mu::Width{64}));
}

TEST_CASE("every conditional jump becomes exactly one branch") {
  struct Row {
    const char *file;
    size_t jcc, cmov;
  };
  for (const Row &row : {Row{"spectre.s", 1, 0}, Row{"spectre_slh.s", 1, 1},
                         Row{"kocher10_slh_o2.s", 2, 2}}) {
    CAPTURE(row.file);
    LowerOut out = translate(fixture(row.file), layout());
    CHECK(count_kind(out.prog, mu::Instr::Kind::Beqz) == row.jcc);
    CHECK(count_kind(out.prog, mu::Instr::Kind::CondAssign) == row.cmov);
  }
}

TEST_CASE("translated code runs like the source it came from") {
  LowerOut out = translate(fixture("spectre.s"), layout());
  mu::Width w{64};

  SUBCASE("in bounds") {
    mu::Config c = testutil::cfg(w, {}, {{64, 2}, {72, 1}, {1025, 3}});
    mu::RunOut r = mu::run_nonspec(out.prog, c, w);
    mu::Trace expect = {
        mu::Obs::load(mu::Value::of(64, w)),
        mu::Obs::load(mu::Value::of(72, w)),
        mu::Obs::pc(mu::Value::of(4, w)),
        mu::Obs::load(mu::Value::of(1025, w)),
        mu::Obs::load(mu::Value::of(67072, w)),
        mu::Obs::load(mu::Value::of(88, w)),
        mu::Obs::store(mu::Value::of(88, w)),
    };
    CHECK(r.trace == expect);
  }
  SUBCASE("out of bounds falls off the end") {
    mu::Config c = testutil::cfg(w, {}, {{64, 2}, {72, 5}});
    mu::RunOut r = mu::run_nonspec(out.prog, c, w);
    mu::Trace expect = {
        mu::Obs::load(mu::Value::of(64, w)),
        mu::Obs::load(mu::Value::of(72, w)),
        mu::Obs::pc(mu::Value::end()),
    };
    CHECK(r.trace == expect);
    CHECK(mu::is_final(r.final_cfg));
  }
  SUBCASE("misprediction reaches the out-of-bounds load") {
    mu::Config c = testutil::cfg(w, {}, {{64, 2}, {72, 5}});
    mu::RunOut r = mu::run_am(out.prog, c, 2, w);
    mu::Trace expect = {
        mu::Obs::load(mu::Value::of(64, w)),
        mu::Obs::load(mu::Value::of(72, w)),
        mu::Obs::start(0),
        mu::Obs::pc(mu::Value::of(4, w)),
        mu::Obs::load(mu::Value::of(1029, w)),
        mu::Obs::rollback(0),
        mu::Obs::pc(mu::Value::end()),
    };
    CHECK(r.trace == expect);
  }
}

TEST_CASE("operand forms lower to the expected addresses") {
  Options o = layout();
  auto one = [&](const std::string &src) {
    return mu::print_program(translate(src, o).prog);
  };

  CHECK(one("mov $5, %rax\n") == "0: rax <- 5\n");
  CHECK(one("mov $-1, %rax\n") == "0: rax <- 18446744073709551615\n");
  CHECK(one("mov $0x10, %rax\n") == "0: rax <- 16\n");
  CHECK(one("mov $B, %rdx\n") == "0: rdx <- 65536\n");
  CHECK(one("mov B, %rcx\n") == "0: load rcx, 65536\n");
  CHECK(one("mov %rcx, y\n") == "0: store rcx, 72\n");
  CHECK(one("mov (%rax), %rbx\n") == "0: load rbx, rax\n");
  CHECK(one("mov 8(%rbx), %rcx\n") == "0: load rcx, 8 + rbx\n");
  CHECK(one("mov %rcx, 8(%rbx)\n") == "0: store rcx, 8 + rbx\n");
  CHECK(one("mov 16(%rax,%rbx,8), %rcx\n") ==
        "0: load rcx, 16 + rax + rbx * 8\n");
  CHECK(one("mov A+8(%rbx), %rcx\n") == "0: load rcx, 1032 + rbx\n");
  CHECK(one("mov (,%rbx,4), %rcx\n") == "0: load rcx, rbx * 4\n");
  CHECK(one("lea 4(%rax), %rbx\n") == "0: rbx <- 4 + rax\n");
  CHECK(one("mov $1, %rax # trailing comment\n") == "0: rax <- 1\n");
}

TEST_CASE("arithmetic lowers in place, including memory read-modify-write") {
  LowerOut out = translate("add $1, %rax\n"
                           "sub %rbx, %rax\n"
                           "xor %rax, %rbx\n"
                           "shr $2, %rbx\n"
                           "add $5, temp\n",
                           layout());
  CHECK(mu::print_program(out.prog) == "0: rax <- rax + 1\n"
                                       "1: rax <- rax - rbx\n"
                                       "2: rbx <- rbx ^ rax\n"
                                       "3: rbx <- rbx >> 2\n"
                                       "4: load tmp0, 88\n"
                                       "5: tmp1 <- tmp0 + 5\n"
                                       "6: store tmp1, 88\n");
}

TEST_CASE("condition codes negate per jump flavour") {
  Options o;
  auto cc_line = [&](const std::string &jcc) {
    LowerOut out =
        translate("cmp %rsi, %rdi\n" + jcc + " L\nnop\nL: nop\n", o);
    std::string text = mu::print_program(out.prog);
    return text.substr(0, text.find('\n'));
  };
  // cmp %rsi, %rdi compares dst %rdi against src %rsi; the cc register holds
  // the branch NOT being taken.
  CHECK(cc_line("jbe") == "0: cc0 <- rsi < rdi");
  CHECK(cc_line("jae") == "0: cc0 <- rdi < rsi");
  CHECK(cc_line("jb") == "0: cc0 <- rsi <= rdi");
  CHECK(cc_line("ja") == "0: cc0 <- rdi <= rsi");
  CHECK(cc_line("je") == "0: cc0 <- rdi != rsi");
  CHECK(cc_line("jne") == "0: cc0 <- rdi = rsi");
}

TEST_CASE("cmov uses the same negated condition as a guarded assignment") {
  LowerOut out = translate("cmp %rsi, %rdi\ncmove %rax, %rbx\n", Options{});
  CHECK(mu::print_program(out.prog) == "0: cc0 <- rdi != rsi\n"
                                       "1: rbx <-cc0? rax\n");
}

TEST_CASE("a branch to its own fall-through gets separated by padding") {
  LowerOut out = translate("cmp %rax, %rbx\n"
                           "je L\n"
                           "L: nop\n",
                           Options{});
  CHECK(mu::print_program(out.prog) == "0: cc0 <- rbx != rax\n"
                                       "1: beqz cc0, 3\n"
                                       "2: skip\n"
                                       "3: skip\n");
  CHECK(out.label_pos.at("L") == 3);
  CHECK_NOTHROW(mu::check_well_formed(out.prog, mu::Width{64}));
}

TEST_CASE("returning leaves the program") {
  LowerOut out = translate("nop\nret\nnop\n", Options{});
  CHECK(mu::print_program(out.prog) == "0: skip\n"
                                       "1: jmp 3\n"
                                       "2: skip\n");
  mu::Width w{64};
  mu::RunOut r = mu::run_nonspec(out.prog, testutil::cfg(w), w);
  CHECK(mu::is_final(r.final_cfg));
}

TEST_CASE("indirect jumps pass through as computed jumps") {
  LowerOut out = translate("jmp *%rax\n", Options{});
  CHECK(mu::print_program(out.prog) == "0: jmp rax\n");

  // Padding would shift positions under the computed target's feet.
  CHECK_THROWS_WITH_AS(translate("cmp %rax, %rbx\n"
                                 "jmp *%rcx\n"
                                 "je L\n"
                                 "L: nop\n",
                                 Options{}),
                       "line 0: cannot pad a branch-to-next in code with "
                       "indirect jumps",
                       TranslateError);
}

TEST_CASE("fences and nops lower directly") {
  LowerOut out = translate("lfence\nnop\n", Options{});
  CHECK(mu::print_program(out.prog) == "0: spbarr\n1: skip\n");
}

TEST_CASE("translation errors carry the offending line") {
  Options o = layout();

  CHECK_THROWS_WITH_AS(translate("mov size, y\n", o),
                       "line 1: mov cannot have two memory operands",
                       TranslateError);
  CHECK_THROWS_WITH_AS(translate("nop\nfrobnicate %rax\n", o),
                       "line 2: unsupported mnemonic 'frobnicate'",
                       TranslateError);
  CHECK_THROWS_WITH_AS(translate("je L\nL: nop\n", o),
                       "line 1: condition 'e' with no preceding cmp",
                       TranslateError);
  CHECK_THROWS_WITH_AS(translate("mov nowhere, %rax\n", o),
                       "line 1: unplaced symbol 'nowhere'", TranslateError);
  CHECK_THROWS_AS(translate("jmp MISSING\n", o), TranslateError);
  CHECK_THROWS_AS(translate("L: nop\nL: nop\n", o), TranslateError);
  CHECK_THROWS_AS(translate("mov (%rax,%rbx,3), %rcx\n", o), TranslateError);
  CHECK_THROWS_AS(translate("jmp *5\n", o), TranslateError);
  CHECK_THROWS_AS(translate("ret $8\n", o), TranslateError);

  try {
    translate("nop\nmov size, y\n", o);
    FAIL("expected a translation error");
  } catch (const TranslateError &e) {
    CHECK(e.line == 2);
  }
}

TEST_CASE("permissive mode turns unknown mnemonics into skips") {
  Options o;
  o.permissive = true;
  LowerOut out = translate("frobnicate %rax\nnop\n", o);
  CHECK(mu::print_program(out.prog) == "0: skip\n1: skip\n");

  // Real operand errors still fail.
  CHECK_THROWS_AS(translate("mov size, y\n", o), TranslateError);
}
