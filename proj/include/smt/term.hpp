#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace smt {

struct Sort {
  enum class Kind { Bool, Bv, Array };

  Kind kind = Kind::Bv;
  unsigned width = 64; // element and index width for Array

  static Sort boolean() { return {Kind::Bool, 0}; }
  static Sort bv(unsigned w) { return {Kind::Bv, w}; }
  static Sort array(unsigned w) { return {Kind::Array, w}; }

  friend bool operator==(const Sort &a, const Sort &b) {
    return a.kind == b.kind && a.width == b.width;
  }
};

struct Term;
using TP = std::shared_ptr<const Term>;

// Quantifier-free bitvector/array terms, a direct image of what gets printed
// as SMT-LIB2.
struct Term {
  enum class Kind { BoolConst, BvConst, Var, App };
  enum class Op {
    Not,
    And,
    Or,
    Iff,
    Implies,
    Eq,
    Ite,
    BvNeg,
    BvNot,
    BvAdd,
    BvSub,
    BvMul,
    BvAnd,
    BvOr,
    BvXor,
    BvShl,
    BvLshr,
    BvUlt,
    BvUle,
    Select,
    Store,
  };

  Kind kind = Kind::BoolConst;
  Op op = Op::Not;
  bool bval = false;    // BoolConst
  uint64_t bits = 0;    // BvConst
  Sort sort;            // Var (declared sort), BvConst (width)
  std::string name;     // Var
  std::vector<TP> args; // App
};

TP mk_true();
TP mk_false();
TP mk_bool(bool b);
TP mk_bv(uint64_t bits, unsigned width);
TP mk_var(std::string name, Sort sort);

// Boolean connectives fold constants.
TP mk_not(TP a);
TP mk_and(TP a, TP b);
TP mk_or(TP a, TP b);
TP mk_iff(TP a, TP b);
TP mk_implies(TP a, TP b);
TP mk_and(const std::vector<TP> &conj);
TP mk_or(const std::vector<TP> &disj);
TP mk_eq(TP a, TP b);
TP mk_ite(TP c, TP t, TP f);
TP mk_ult(TP a, TP b);
TP mk_ule(TP a, TP b);
TP mk_bv_un(Term::Op op, TP a);
TP mk_bv_bin(Term::Op op, TP a, TP b);
TP mk_select(TP arr, TP idx);
TP mk_store(TP arr, TP idx, TP val);

bool is_const_bool(const TP &t, bool b);

// Free variables with their sorts, collected over all subterms.
void collect_vars(const TP &t, std::map<std::string, Sort> &out);

// Sort of a well-formed term, derived structurally.
Sort infer_sort(const TP &t);

// One satisfiability query: a single assertion plus named terms whose values
// the caller wants back from a satisfying assignment.
struct Query {
  TP assertion;
  std::vector<std::pair<std::string, TP>> evals;
};

// Deterministic SMT-LIB2 rendering of the query (QF_ABV, model production
// on, one value probe per eval entry).
std::string to_smtlib(const Query &q);

std::string to_string(const TP &t);

} // namespace smt
