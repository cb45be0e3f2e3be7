#include "smt/term.hpp"

#include <cassert>
#include <sstream>

namespace smt {

namespace {

TP app(Term::Op op, std::vector<TP> args) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::App;
  t->op = op;
  t->args = std::move(args);
  return t;
}

} // namespace

TP mk_true() {
  static const TP t = [] {
    auto x = std::make_shared<Term>();
    x->kind = Term::Kind::BoolConst;
    x->bval = true;
    return x;
  }();
  return t;
}

TP mk_false() {
  static const TP t = [] {
    auto x = std::make_shared<Term>();
    x->kind = Term::Kind::BoolConst;
    x->bval = false;
    return x;
  }();
  return t;
}

TP mk_bool(bool b) { return b ? mk_true() : mk_false(); }

TP mk_bv(uint64_t bits, unsigned width) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::BvConst;
  t->bits = width >= 64 ? bits : (bits & ((1ull << width) - 1));
  t->sort = Sort::bv(width);
  return t;
}

TP mk_var(std::string name, Sort sort) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Var;
  t->name = std::move(name);
  t->sort = sort;
  return t;
}

bool is_const_bool(const TP &t, bool b) {
  return t->kind == Term::Kind::BoolConst && t->bval == b;
}

TP mk_not(TP a) {
  if (a->kind == Term::Kind::BoolConst)
    return mk_bool(!a->bval);
  return app(Term::Op::Not, {std::move(a)});
}

TP mk_and(TP a, TP b) {
  if (is_const_bool(a, false) || is_const_bool(b, false))
    return mk_false();
  if (is_const_bool(a, true))
    return b;
  if (is_const_bool(b, true))
    return a;
  return app(Term::Op::And, {std::move(a), std::move(b)});
}

TP mk_or(TP a, TP b) {
  if (is_const_bool(a, true) || is_const_bool(b, true))
    return mk_true();
  if (is_const_bool(a, false))
    return b;
  if (is_const_bool(b, false))
    return a;
  return app(Term::Op::Or, {std::move(a), std::move(b)});
}

TP mk_iff(TP a, TP b) {
  if (a->kind == Term::Kind::BoolConst)
    return a->bval ? b : mk_not(b);
  if (b->kind == Term::Kind::BoolConst)
    return b->bval ? a : mk_not(a);
  return app(Term::Op::Iff, {std::move(a), std::move(b)});
}

TP mk_implies(TP a, TP b) {
  if (a->kind == Term::Kind::BoolConst)
    return a->bval ? b : mk_true();
  if (b->kind == Term::Kind::BoolConst)
    return b->bval ? mk_true() : mk_not(a);
  return app(Term::Op::Implies, {std::move(a), std::move(b)});
}

TP mk_and(const std::vector<TP> &conj) {
  TP acc = mk_true();
  for (const auto &c : conj)
    acc = mk_and(acc, c);
  return acc;
}

TP mk_or(const std::vector<TP> &disj) {
  TP acc = mk_false();
  for (const auto &d : disj)
    acc = mk_or(acc, d);
  return acc;
}

TP mk_eq(TP a, TP b) {
  if (a->kind == Term::Kind::BvConst && b->kind == Term::Kind::BvConst)
    return mk_bool(a->bits == b->bits);
  if (a->kind == Term::Kind::BoolConst && b->kind == Term::Kind::BoolConst)
    return mk_bool(a->bval == b->bval);
  return app(Term::Op::Eq, {std::move(a), std::move(b)});
}

TP mk_ite(TP c, TP t, TP f) {
  if (c->kind == Term::Kind::BoolConst)
    return c->bval ? t : f;
  return app(Term::Op::Ite, {std::move(c), std::move(t), std::move(f)});
}

TP mk_ult(TP a, TP b) {
  if (a->kind == Term::Kind::BvConst && b->kind == Term::Kind::BvConst)
    return mk_bool(a->bits < b->bits);
  return app(Term::Op::BvUlt, {std::move(a), std::move(b)});
}

TP mk_ule(TP a, TP b) {
  if (a->kind == Term::Kind::BvConst && b->kind == Term::Kind::BvConst)
    return mk_bool(a->bits <= b->bits);
  return app(Term::Op::BvUle, {std::move(a), std::move(b)});
}

TP mk_bv_un(Term::Op op, TP a) { return app(op, {std::move(a)}); }

TP mk_bv_bin(Term::Op op, TP a, TP b) {
  return app(op, {std::move(a), std::move(b)});
}

TP mk_select(TP arr, TP idx) {
  return app(Term::Op::Select, {std::move(arr), std::move(idx)});
}

TP mk_store(TP arr, TP idx, TP val) {
  return app(Term::Op::Store, {std::move(arr), std::move(idx), std::move(val)});
}

void collect_vars(const TP &t, std::map<std::string, Sort> &out) {
  switch (t->kind) {
  case Term::Kind::BoolConst:
  case Term::Kind::BvConst:
    break;
  case Term::Kind::Var: {
    auto [it, inserted] = out.emplace(t->name, t->sort);
    assert(inserted || it->second == t->sort);
    (void)it;
    break;
  }
  case Term::Kind::App:
    for (const auto &a : t->args)
      collect_vars(a, out);
    break;
  }
}

namespace {

const char *op_str(Term::Op op) {
  switch (op) {
  case Term::Op::Not:
    return "not";
  case Term::Op::And:
    return "and";
  case Term::Op::Or:
    return "or";
  case Term::Op::Iff:
    return "=";
  case Term::Op::Implies:
    return "=>";
  case Term::Op::Eq:
    return "=";
  case Term::Op::Ite:
    return "ite";
  case Term::Op::BvNeg:
    return "bvneg";
  case Term::Op::BvNot:
    return "bvnot";
  case Term::Op::BvAdd:
    return "bvadd";
  case Term::Op::BvSub:
    return "bvsub";
  case Term::Op::BvMul:
    return "bvmul";
  case Term::Op::BvAnd:
    return "bvand";
  case Term::Op::BvOr:
    return "bvor";
  case Term::Op::BvXor:
    return "bvxor";
  case Term::Op::BvShl:
    return "bvshl";
  case Term::Op::BvLshr:
    return "bvlshr";
  case Term::Op::BvUlt:
    return "bvult";
  case Term::Op::BvUle:
    return "bvule";
  case Term::Op::Select:
    return "select";
  case Term::Op::Store:
    return "store";
  }
  return "?";
}

void print(std::ostream &os, const TP &t) {
  switch (t->kind) {
  case Term::Kind::BoolConst:
    os << (t->bval ? "true" : "false");
    break;
  case Term::Kind::BvConst:
    os << "(_ bv" << t->bits << " " << t->sort.width << ")";
    break;
  case Term::Kind::Var:
    os << "|" << t->name << "|";
    break;
  case Term::Kind::App:
    os << "(" << op_str(t->op);
    for (const auto &a : t->args) {
      os << " ";
      print(os, a);
    }
    os << ")";
    break;
  }
}

void print_sort(std::ostream &os, const Sort &s) {
  switch (s.kind) {
  case Sort::Kind::Bool:
    os << "Bool";
    break;
  case Sort::Kind::Bv:
    os << "(_ BitVec " << s.width << ")";
    break;
  case Sort::Kind::Array:
    os << "(Array (_ BitVec " << s.width << ") (_ BitVec " << s.width << "))";
    break;
  }
}

} // namespace

Sort infer_sort(const TP &t) {
  switch (t->kind) {
  case Term::Kind::BoolConst:
    return Sort::boolean();
  case Term::Kind::BvConst:
  case Term::Kind::Var:
    return t->sort;
  case Term::Kind::App:
    switch (t->op) {
    case Term::Op::Not:
    case Term::Op::And:
    case Term::Op::Or:
    case Term::Op::Iff:
    case Term::Op::Implies:
    case Term::Op::Eq:
    case Term::Op::BvUlt:
    case Term::Op::BvUle:
      return Sort::boolean();
    case Term::Op::Ite:
      return infer_sort(t->args[1]);
    case Term::Op::Select:
      return Sort::bv(infer_sort(t->args[0]).width);
    case Term::Op::Store:
      return infer_sort(t->args[0]);
    default:
      return infer_sort(t->args[0]);
    }
  }
  return Sort::bv(64);
}

std::string to_string(const TP &t) {
  std::ostringstream os;
  print(os, t);
  return os.str();
}

std::string to_smtlib(const Query &q) {
  std::map<std::string, Sort> vars;
  collect_vars(q.assertion, vars);
  for (const auto &[name, term] : q.evals)
    collect_vars(term, vars);

  std::ostringstream os;
  os << "(set-option :produce-models true)\n";
  os << "(set-logic QF_ABV)\n";
  for (const auto &[name, sort] : vars) {
    os << "(declare-const |" << name << "| ";
    print_sort(os, sort);
    os << ")\n";
  }
  // Name each probed term so the response echoes short identifiers instead
  // of whole terms.
  for (const auto &[name, term] : q.evals) {
    os << "(declare-const |" << name << "| ";
    print_sort(os, infer_sort(term));
    os << ")\n";
  }
  os << "(assert ";
  print(os, q.assertion);
  os << ")\n";
  for (const auto &[name, term] : q.evals) {
    os << "(assert (= |" << name << "| ";
    print(os, term);
    os << "))\n";
  }
  os << "(check-sat)\n";
  if (!q.evals.empty()) {
    os << "(get-value (";
    bool first = true;
    for (const auto &[name, term] : q.evals) {
      if (!first)
        os << " ";
      os << "|" << name << "|";
      first = false;
    }
    os << "))\n";
  }
  return os.str();
}

} // namespace smt
