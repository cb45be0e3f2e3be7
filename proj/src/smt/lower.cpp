#include "smt/lower.hpp"

namespace smt {

std::string var_name(const std::string &sym, int copy) {
  return sym + "!" + std::to_string(copy);
}

std::string mem_name(int copy) { return "mem!" + std::to_string(copy); }

TP lower_mem(const sym::SM &m, int copy, mu::Width w) {
  if (m->kind == sym::SymMem::Kind::Base)
    return mk_var(mem_name(copy), Sort::array(w.bits));
  return mk_store(lower_mem(m->prev, copy, w), lower_word(m->addr, copy, w),
                  lower_word(m->val, copy, w));
}

namespace {

// 0/1-valued by construction, so "!= 0" coincides with its logical reading
// even under bitwise conjunction.
bool bool_shaped(const sym::SE &e) {
  using K = sym::SymExpr::Kind;
  switch (e->kind) {
  case K::Num:
    return e->num <= 1;
  case K::Bin:
    switch (e->bin) {
    case mu::BinOp::Lt:
    case mu::BinOp::Le:
    case mu::BinOp::Eq:
    case mu::BinOp::Ne:
      return true;
    case mu::BinOp::And:
    case mu::BinOp::Or:
      return bool_shaped(e->a) && bool_shaped(e->b);
    default:
      return false;
    }
  case K::Ite:
    return bool_shaped(e->b) && bool_shaped(e->c);
  default:
    return false;
  }
}

} // namespace

TP lower_word(const sym::SE &e, int copy, mu::Width w) {
  using K = sym::SymExpr::Kind;
  switch (e->kind) {
  case K::Num:
    return mk_bv(e->num, w.bits);
  case K::Sym:
    return mk_var(var_name(e->sym, copy), Sort::bv(w.bits));
  case K::Ite:
    return mk_ite(lower_truth(e->a, copy, w), lower_word(e->b, copy, w),
                  lower_word(e->c, copy, w));
  case K::Un:
    return mk_bv_un(e->un == mu::UnOp::Neg ? Term::Op::BvNeg : Term::Op::BvNot,
                    lower_word(e->a, copy, w));
  case K::Bin: {
    TP a = lower_word(e->a, copy, w);
    TP b = lower_word(e->b, copy, w);
    TP one = mk_bv(1, w.bits);
    TP zero = mk_bv(0, w.bits);
    switch (e->bin) {
    case mu::BinOp::Add:
      return mk_bv_bin(Term::Op::BvAdd, a, b);
    case mu::BinOp::Sub:
      return mk_bv_bin(Term::Op::BvSub, a, b);
    case mu::BinOp::Mul:
      return mk_bv_bin(Term::Op::BvMul, a, b);
    case mu::BinOp::And:
      return mk_bv_bin(Term::Op::BvAnd, a, b);
    case mu::BinOp::Or:
      return mk_bv_bin(Term::Op::BvOr, a, b);
    case mu::BinOp::Xor:
      return mk_bv_bin(Term::Op::BvXor, a, b);
    case mu::BinOp::Shl:
      return mk_bv_bin(Term::Op::BvShl, a, b);
    case mu::BinOp::Shr:
      return mk_bv_bin(Term::Op::BvLshr, a, b);
    case mu::BinOp::Lt:
      return mk_ite(mk_ult(a, b), one, zero);
    case mu::BinOp::Le:
      return mk_ite(mk_ule(a, b), one, zero);
    case mu::BinOp::Eq:
      return mk_ite(mk_eq(a, b), one, zero);
    case mu::BinOp::Ne:
      return mk_ite(mk_eq(a, b), zero, one);
    }
    return zero;
  }
  case K::Read:
    return mk_select(lower_mem(e->mem, copy, w), lower_word(e->b, copy, w));
  }
  return mk_bv(0, w.bits);
}

TP lower_truth(const sym::SE &e, int copy, mu::Width w) {
  using K = sym::SymExpr::Kind;
  switch (e->kind) {
  case K::Num:
    return mk_bool(e->num != 0);
  case K::Ite:
    return mk_ite(lower_truth(e->a, copy, w), lower_truth(e->b, copy, w),
                  lower_truth(e->c, copy, w));
  case K::Bin:
    switch (e->bin) {
    case mu::BinOp::Lt:
      return mk_ult(lower_word(e->a, copy, w), lower_word(e->b, copy, w));
    case mu::BinOp::Le:
      return mk_ule(lower_word(e->a, copy, w), lower_word(e->b, copy, w));
    case mu::BinOp::Eq:
      return mk_eq(lower_word(e->a, copy, w), lower_word(e->b, copy, w));
    case mu::BinOp::Ne:
      return mk_not(
          mk_eq(lower_word(e->a, copy, w), lower_word(e->b, copy, w)));
    case mu::BinOp::Or:
      // a|b != 0 iff either side is nonzero.
      return mk_or(lower_truth(e->a, copy, w), lower_truth(e->b, copy, w));
    case mu::BinOp::And:
      if (bool_shaped(e->a) && bool_shaped(e->b))
        return mk_and(lower_truth(e->a, copy, w), lower_truth(e->b, copy, w));
      break;
    default:
      break;
    }
    break;
  default:
    break;
  }
  return mk_not(mk_eq(lower_word(e, copy, w), mk_bv(0, w.bits)));
}

} // namespace smt
