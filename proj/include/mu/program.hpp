#pragma once

#include "mu/value.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace mu {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Register expression over machine words. Registers are named; the program
// counter is not addressable from expressions.
struct Expr {
  enum class Kind { Num, Reg, Un, Bin };

  Kind kind = Kind::Num;
  uint64_t num = 0;
  std::string reg;
  UnOp un = UnOp::Neg;
  BinOp bin = BinOp::Add;
  ExprPtr a, b;

  static ExprPtr make_num(uint64_t n);
  static ExprPtr make_reg(std::string name);
  static ExprPtr make_un(UnOp op, ExprPtr e);
  static ExprPtr make_bin(BinOp op, ExprPtr a, ExprPtr b);
};

bool expr_equal(const Expr &a, const Expr &b);

// Collects register names read by an expression into out (deduplicated).
void expr_regs(const Expr &e, std::vector<std::string> &out);

struct Instr {
  enum class Kind { Skip, Assign, CondAssign, Load, Store, Jmp, Beqz, Spbarr };

  Kind kind = Kind::Skip;
  std::string reg; // Assign/CondAssign/Load destination; Store source; Beqz condition
  ExprPtr e;       // Assign/CondAssign value; Load/Store address; Jmp target
  ExprPtr cond;    // CondAssign only: assigns when this evaluates to 0
  Value target;    // Beqz taken target (may be end)

  static Instr skip();
  static Instr assign(std::string x, ExprPtr e);
  static Instr cond_assign(std::string x, ExprPtr cond, ExprPtr value);
  static Instr load(std::string x, ExprPtr addr);
  static Instr store(std::string x, ExprPtr addr);
  static Instr jmp(ExprPtr target);
  static Instr beqz(std::string x, Value target);
  static Instr spbarr();
};

// Instructions are addressed by position: instruction i carries label i.
using Program = std::vector<Instr>;

struct WellFormedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A program must be non-empty (execution starts at label 0), must fit in the
// word width, and no branch may target the instruction it falls through to
// anyway (such a branch could never be observed as a branch).
void check_well_formed(const Program &p, Width w);

// All register names mentioned anywhere in the program, sorted, deduplicated.
std::vector<std::string> program_regs(const Program &p);

// Registers whose initial value can reach a use: live-in at label 0 over the
// control-flow graph where a branch may go either way.
std::vector<std::string> live_in_regs(const Program &p);

} // namespace mu
