#pragma once

#include "mu/config.hpp"
#include "mu/program.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mu {

struct ParseError : std::runtime_error {
  size_t line;
  ParseError(size_t line, const std::string &msg)
      : std::runtime_error("line " + std::to_string(line) + ": " + msg),
        line(line) {}
};

// Program text: one labeled instruction per line, labels counting up from 0.
//
//   0: x <- y < size
//   1: beqz x, end
//   2: load z, A + y
//   3: store z, B + (x << 2)
//   4: x <-c? y + 1        # assigns when c evaluates to 0
//   5: jmp 0
//   6: skip
//   7: spbarr
//
// '#' starts a comment. Branch targets are decimal labels or "end".
Program parse_program(const std::string &text);
std::string print_program(const Program &p);

ExprPtr parse_expr(const std::string &text);
std::string print_expr(const Expr &e);

// Policy text: one declaration per line, '#' comments.
//
//   low reg y
//   low mem 256
Policy parse_policy(const std::string &text);

} // namespace mu
