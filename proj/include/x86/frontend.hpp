#pragma once

#include "mu/program.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace x86 {

// Translates a small AT&T-syntax subset into the core language:
//   mov, add, sub, and, or, xor, shl, shr, lea, cmp,
//   jmp (direct and *%reg), jbe/jae/jb/ja/je/jne,
//   cmovbe/cmovae/cmovb/cmova/cmove/cmovne, lfence, nop, ret.
//
// Conditions use unsigned comparison semantics. A cmp records its operands;
// each later jcc or cmov re-evaluates them into a fresh ccN register holding
// the negated condition (so the 0-means-taken branch consumes it directly).
// Operands read at the jcc must therefore still hold their compare-time
// values, which is the shape compilers emit.
//
// Data symbols must be placed explicitly: the symbol table maps names to
// addresses. Code labels resolve to instruction positions; a label after the
// last instruction resolves to the program end.
struct TranslateError : std::runtime_error {
  explicit TranslateError(size_t line, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line(line) {}
  size_t line;
};

struct Options {
  std::map<std::string, uint64_t> symbols;
  // Lower unsupported mnemonics to skip instead of failing. Unsound (the
  // skipped instruction's effect is lost) but lets partially supported
  // listings through; off by default.
  bool permissive = false;
};

struct LowerOut {
  mu::Program prog;
  std::map<std::string, uint64_t> label_pos; // code label -> position
};

LowerOut translate(const std::string &att_source, const Options &opts);

// "name = address" per line, addresses decimal or 0x-hex; '#' comments.
std::map<std::string, uint64_t> parse_symbols(const std::string &text);

} // namespace x86
