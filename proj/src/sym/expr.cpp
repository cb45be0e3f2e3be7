#include "sym/expr.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace sym {

SE se_num(uint64_t n, Width w) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Num;
  e->num = w.trunc(n);
  return e;
}

SE se_sym(std::string name) {
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Sym;
  e->sym = std::move(name);
  return e;
}

SE se_ite(SE cond, SE then_e, SE else_e) {
  if (is_num(cond))
    return cond->num != 0 ? then_e : else_e;
  if (se_equal(then_e, else_e))
    return then_e;
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Ite;
  e->a = std::move(cond);
  e->b = std::move(then_e);
  e->c = std::move(else_e);
  return e;
}

SE se_un(UnOp op, SE a, Width w) {
  if (is_num(a))
    return se_num(mu::apply_un(op, a->num, w), w);
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Un;
  e->un = op;
  e->a = std::move(a);
  return e;
}

SE se_bin(BinOp op, SE a, SE b, Width w) {
  if (is_num(a) && is_num(b))
    return se_num(mu::apply_bin(op, a->num, b->num, w), w);
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Bin;
  e->bin = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

SE se_read(SM m, SE addr, Width w) {
  // Resolve through writes while both addresses are concrete.
  if (is_num(addr)) {
    const SymMem *cur = m.get();
    SM cur_sp = m;
    while (cur->kind == SymMem::Kind::Write && is_num(cur->addr)) {
      if (cur->addr->num == addr->num)
        return cur->val;
      cur_sp = cur->prev;
      cur = cur_sp.get();
    }
    m = cur_sp;
  }
  auto e = std::make_shared<SymExpr>();
  e->kind = SymExpr::Kind::Read;
  e->mem = std::move(m);
  e->b = std::move(addr);
  (void)w;
  return e;
}

SM sm_base() {
  static const SM base = std::make_shared<SymMem>();
  return base;
}

SM sm_write(SM m, SE addr, SE val) {
  auto out = std::make_shared<SymMem>();
  out->kind = SymMem::Kind::Write;
  out->prev = std::move(m);
  out->addr = std::move(addr);
  out->val = std::move(val);
  return out;
}

bool se_equal(const SE &a, const SE &b) {
  if (a.get() == b.get())
    return true;
  if (a->kind != b->kind)
    return false;
  switch (a->kind) {
  case SymExpr::Kind::Num:
    return a->num == b->num;
  case SymExpr::Kind::Sym:
    return a->sym == b->sym;
  case SymExpr::Kind::Ite:
    return se_equal(a->a, b->a) && se_equal(a->b, b->b) && se_equal(a->c, b->c);
  case SymExpr::Kind::Un:
    return a->un == b->un && se_equal(a->a, b->a);
  case SymExpr::Kind::Bin:
    return a->bin == b->bin && se_equal(a->a, b->a) && se_equal(a->b, b->b);
  case SymExpr::Kind::Read:
    return se_equal(a->b, b->b) && sm_equal(a->mem, b->mem);
  }
  return false;
}

bool sm_equal(const SM &a, const SM &b) {
  if (a.get() == b.get())
    return true;
  if (a->kind != b->kind)
    return false;
  if (a->kind == SymMem::Kind::Base)
    return true;
  return se_equal(a->addr, b->addr) && se_equal(a->val, b->val) &&
         sm_equal(a->prev, b->prev);
}

std::string to_string(const SE &e) {
  std::ostringstream os;
  switch (e->kind) {
  case SymExpr::Kind::Num:
    os << e->num;
    break;
  case SymExpr::Kind::Sym:
    os << e->sym;
    break;
  case SymExpr::Kind::Ite:
    os << "ite(" << to_string(e->a) << ", " << to_string(e->b) << ", "
       << to_string(e->c) << ")";
    break;
  case SymExpr::Kind::Un:
    os << mu::un_op_str(e->un) << to_string(e->a);
    break;
  case SymExpr::Kind::Bin:
    os << "(" << to_string(e->a) << " " << mu::bin_op_str(e->bin) << " "
       << to_string(e->b) << ")";
    break;
  case SymExpr::Kind::Read:
    os << to_string(e->mem) << "[" << to_string(e->b) << "]";
    break;
  }
  return os.str();
}

std::string to_string(const SM &m) {
  if (m->kind == SymMem::Kind::Base)
    return "mem";
  return to_string(m->prev) + "[" + to_string(m->addr) +
         " := " + to_string(m->val) + "]";
}

namespace {

void collect_syms_rec(const SE &e, std::vector<std::string> &out);

void collect_syms_rec(const SM &m, std::vector<std::string> &out) {
  if (m->kind == SymMem::Kind::Base)
    return;
  collect_syms_rec(m->addr, out);
  collect_syms_rec(m->val, out);
  collect_syms_rec(m->prev, out);
}

void collect_syms_rec(const SE &e, std::vector<std::string> &out) {
  switch (e->kind) {
  case SymExpr::Kind::Num:
    break;
  case SymExpr::Kind::Sym:
    out.push_back(e->sym);
    break;
  case SymExpr::Kind::Ite:
    collect_syms_rec(e->a, out);
    collect_syms_rec(e->b, out);
    collect_syms_rec(e->c, out);
    break;
  case SymExpr::Kind::Un:
    collect_syms_rec(e->a, out);
    break;
  case SymExpr::Kind::Bin:
    collect_syms_rec(e->a, out);
    collect_syms_rec(e->b, out);
    break;
  case SymExpr::Kind::Read:
    collect_syms_rec(e->b, out);
    collect_syms_rec(e->mem, out);
    break;
  }
}

void dedup_sort(std::vector<std::string> &v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

void collect_reads_rec(const SE &e, std::vector<SE> &out);

void collect_reads_rec(const SM &m, std::vector<SE> &out) {
  if (m->kind == SymMem::Kind::Base)
    return;
  collect_reads_rec(m->addr, out);
  collect_reads_rec(m->val, out);
  collect_reads_rec(m->prev, out);
}

void collect_reads_rec(const SE &e, std::vector<SE> &out) {
  switch (e->kind) {
  case SymExpr::Kind::Num:
  case SymExpr::Kind::Sym:
    break;
  case SymExpr::Kind::Ite:
    collect_reads_rec(e->a, out);
    collect_reads_rec(e->b, out);
    collect_reads_rec(e->c, out);
    break;
  case SymExpr::Kind::Un:
    collect_reads_rec(e->a, out);
    break;
  case SymExpr::Kind::Bin:
    collect_reads_rec(e->a, out);
    collect_reads_rec(e->b, out);
    break;
  case SymExpr::Kind::Read: {
    bool seen = false;
    for (const auto &r : out)
      if (se_equal(r, e)) {
        seen = true;
        break;
      }
    if (!seen)
      out.push_back(e);
    collect_reads_rec(e->b, out);
    collect_reads_rec(e->mem, out);
    break;
  }
  }
}

} // namespace

void collect_syms(const SE &e, std::vector<std::string> &out) {
  collect_syms_rec(e, out);
  dedup_sort(out);
}

void collect_syms(const SM &m, std::vector<std::string> &out) {
  collect_syms_rec(m, out);
  dedup_sort(out);
}

void collect_reads(const SE &e, std::vector<SE> &out) {
  collect_reads_rec(e, out);
}

void collect_reads(const SM &m, std::vector<SE> &out) {
  collect_reads_rec(m, out);
}

namespace {

uint64_t eval_mem(const SM &m, uint64_t addr, const Valuation &v, Width w) {
  if (m->kind == SymMem::Kind::Base)
    return w.trunc(v.cell_value(addr));
  if (eval(m->addr, v, w) == addr)
    return eval(m->val, v, w);
  return eval_mem(m->prev, addr, v, w);
}

} // namespace

uint64_t eval(const SE &e, const Valuation &v, Width w) {
  switch (e->kind) {
  case SymExpr::Kind::Num:
    return e->num;
  case SymExpr::Kind::Sym:
    return w.trunc(v.sym_value(e->sym));
  case SymExpr::Kind::Ite:
    return eval(e->a, v, w) != 0 ? eval(e->b, v, w) : eval(e->c, v, w);
  case SymExpr::Kind::Un:
    return mu::apply_un(e->un, eval(e->a, v, w), w);
  case SymExpr::Kind::Bin:
    return mu::apply_bin(e->bin, eval(e->a, v, w), eval(e->b, v, w), w);
  case SymExpr::Kind::Read:
    for (const auto &[term, val] : v.read_values)
      if (se_equal(term, e))
        return w.trunc(val);
    return eval_mem(e->mem, eval(e->b, v, w), v, w);
  }
  return 0;
}

SE eval_expr(const mu::Expr &e, const SymRegs &regs, Width w) {
  switch (e.kind) {
  case mu::Expr::Kind::Num:
    return se_num(e.num, w);
  case mu::Expr::Kind::Reg:
    return regs.get(e.reg);
  case mu::Expr::Kind::Un:
    return se_un(e.un, eval_expr(*e.a, regs, w), w);
  case mu::Expr::Kind::Bin:
    return se_bin(e.bin, eval_expr(*e.a, regs, w), eval_expr(*e.b, regs, w),
                  w);
  }
  return se_num(0, w);
}

} // namespace sym
