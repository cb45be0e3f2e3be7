#pragma once

#include "mu/program.hpp"
#include "mu/value.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace sym {

using mu::BinOp;
using mu::UnOp;
using mu::Value;
using mu::Width;

struct SymExpr;
struct SymMem;
using SE = std::shared_ptr<const SymExpr>;
using SM = std::shared_ptr<const SymMem>;

// Symbolic word: concrete number, named unknown, if-then-else (condition is
// truthy iff non-zero), operator application, or a read from symbolic memory.
struct SymExpr {
  enum class Kind { Num, Sym, Ite, Un, Bin, Read };

  Kind kind = Kind::Num;
  uint64_t num = 0;
  std::string sym;
  UnOp un = UnOp::Neg;
  BinOp bin = BinOp::Add;
  SE a, b, c; // Ite: a ? b : c. Un: a. Bin: a op b. Read: b is the address.
  SM mem;     // Read only
};

// Symbolic memory: the unconstrained initial memory, or a write on top of
// another symbolic memory.
struct SymMem {
  enum class Kind { Base, Write };

  Kind kind = Kind::Base;
  SM prev;
  SE addr, val;
};

// Builders fold concrete operands: operators and ites over numbers evaluate
// immediately, and reads resolve through writes whose addresses are known.
SE se_num(uint64_t n, Width w);
SE se_sym(std::string name);
SE se_ite(SE cond, SE then_e, SE else_e);
SE se_un(UnOp op, SE a, Width w);
SE se_bin(BinOp op, SE a, SE b, Width w);
SE se_read(SM m, SE addr, Width w);
SM sm_base();
SM sm_write(SM m, SE addr, SE val);

inline bool is_num(const SE &e) { return e->kind == SymExpr::Kind::Num; }

bool se_equal(const SE &a, const SE &b);
bool sm_equal(const SM &a, const SM &b);

std::string to_string(const SE &e);
std::string to_string(const SM &m);

// Register symvars read anywhere in the expression (deduplicated, sorted).
void collect_syms(const SE &e, std::vector<std::string> &out);
void collect_syms(const SM &m, std::vector<std::string> &out);

// All read subterms, outermost first (deduplicated structurally).
void collect_reads(const SE &e, std::vector<SE> &out);
void collect_reads(const SM &m, std::vector<SE> &out);

// An assignment of concrete values to the unknowns: register symvars by name
// and initial memory cells by address (absent cells are 0). read_values, when
// present, gives pre-evaluated results for whole read subterms and is
// consulted first, which keeps wide-word models usable without enumerating
// memory.
struct Valuation {
  std::map<std::string, uint64_t> syms;
  std::map<uint64_t, uint64_t> cells;
  std::vector<std::pair<SE, uint64_t>> read_values;

  uint64_t sym_value(const std::string &name) const {
    auto it = syms.find(name);
    return it == syms.end() ? 0 : it->second;
  }
  uint64_t cell_value(uint64_t addr) const {
    auto it = cells.find(addr);
    return it == cells.end() ? 0 : it->second;
  }
};

uint64_t eval(const SE &e, const Valuation &v, Width w);

// Symbolic register file: unwritten registers denote their own initial
// unknown, so lookups never fail.
struct SymRegs {
  std::map<std::string, SE> m;

  SE get(const std::string &r) const {
    auto it = m.find(r);
    return it == m.end() ? se_sym(r) : it->second;
  }
  void set(const std::string &r, SE v) { m[r] = std::move(v); }
};

// Symbolic evaluation of a program expression with constant folding.
SE eval_expr(const mu::Expr &e, const SymRegs &regs, Width w);

} // namespace sym
