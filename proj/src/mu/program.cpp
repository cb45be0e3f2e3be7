#include "mu/program.hpp"

#include <algorithm>
#include <set>

namespace mu {

ExprPtr Expr::make_num(uint64_t n) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Num;
  e->num = n;
  return e;
}

ExprPtr Expr::make_reg(std::string name) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Reg;
  e->reg = std::move(name);
  return e;
}

ExprPtr Expr::make_un(UnOp op, ExprPtr inner) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Un;
  e->un = op;
  e->a = std::move(inner);
  return e;
}

ExprPtr Expr::make_bin(BinOp op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->kind = Kind::Bin;
  e->bin = op;
  e->a = std::move(a);
  e->b = std::move(b);
  return e;
}

bool expr_equal(const Expr &a, const Expr &b) {
  if (a.kind != b.kind)
    return false;
  switch (a.kind) {
  case Expr::Kind::Num:
    return a.num == b.num;
  case Expr::Kind::Reg:
    return a.reg == b.reg;
  case Expr::Kind::Un:
    return a.un == b.un && expr_equal(*a.a, *b.a);
  case Expr::Kind::Bin:
    return a.bin == b.bin && expr_equal(*a.a, *b.a) && expr_equal(*a.b, *b.b);
  }
  return false;
}

void expr_regs(const Expr &e, std::vector<std::string> &out) {
  switch (e.kind) {
  case Expr::Kind::Num:
    break;
  case Expr::Kind::Reg:
    if (std::find(out.begin(), out.end(), e.reg) == out.end())
      out.push_back(e.reg);
    break;
  case Expr::Kind::Un:
    expr_regs(*e.a, out);
    break;
  case Expr::Kind::Bin:
    expr_regs(*e.a, out);
    expr_regs(*e.b, out);
    break;
  }
}

Instr Instr::skip() { return Instr{}; }

Instr Instr::assign(std::string x, ExprPtr e) {
  Instr i;
  i.kind = Kind::Assign;
  i.reg = std::move(x);
  i.e = std::move(e);
  return i;
}

Instr Instr::cond_assign(std::string x, ExprPtr cond, ExprPtr value) {
  Instr i;
  i.kind = Kind::CondAssign;
  i.reg = std::move(x);
  i.cond = std::move(cond);
  i.e = std::move(value);
  return i;
}

Instr Instr::load(std::string x, ExprPtr addr) {
  Instr i;
  i.kind = Kind::Load;
  i.reg = std::move(x);
  i.e = std::move(addr);
  return i;
}

Instr Instr::store(std::string x, ExprPtr addr) {
  Instr i;
  i.kind = Kind::Store;
  i.reg = std::move(x);
  i.e = std::move(addr);
  return i;
}

Instr Instr::jmp(ExprPtr target) {
  Instr i;
  i.kind = Kind::Jmp;
  i.e = std::move(target);
  return i;
}

Instr Instr::beqz(std::string x, Value target) {
  Instr i;
  i.kind = Kind::Beqz;
  i.reg = std::move(x);
  i.target = target;
  return i;
}

Instr Instr::spbarr() {
  Instr i;
  i.kind = Kind::Spbarr;
  return i;
}

void check_well_formed(const Program &p, Width w) {
  if (p.empty())
    throw WellFormedError("program has no instructions (label 0 must exist)");
  if (p.size() > w.mask())
    throw WellFormedError("program does not fit in the word width");
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i].kind == Instr::Kind::Beqz && !p[i].target.is_end() &&
        p[i].target.bits() == i + 1)
      throw WellFormedError("branch at " + std::to_string(i) +
                            " targets its own fall-through successor");
  }
}

namespace {

void instr_reads(const Instr &ins, std::vector<std::string> &out) {
  switch (ins.kind) {
  case Instr::Kind::Skip:
  case Instr::Kind::Spbarr:
    break;
  case Instr::Kind::Assign:
    expr_regs(*ins.e, out);
    break;
  case Instr::Kind::CondAssign:
    expr_regs(*ins.cond, out);
    expr_regs(*ins.e, out);
    // The old value survives when the condition is non-zero.
    if (std::find(out.begin(), out.end(), ins.reg) == out.end())
      out.push_back(ins.reg);
    break;
  case Instr::Kind::Load:
    expr_regs(*ins.e, out);
    break;
  case Instr::Kind::Store:
    expr_regs(*ins.e, out);
    if (std::find(out.begin(), out.end(), ins.reg) == out.end())
      out.push_back(ins.reg);
    break;
  case Instr::Kind::Jmp:
    expr_regs(*ins.e, out);
    break;
  case Instr::Kind::Beqz:
    if (std::find(out.begin(), out.end(), ins.reg) == out.end())
      out.push_back(ins.reg);
    break;
  }
}

bool instr_writes(const Instr &ins, std::string &reg) {
  switch (ins.kind) {
  case Instr::Kind::Assign:
  case Instr::Kind::CondAssign:
  case Instr::Kind::Load:
    reg = ins.reg;
    return true;
  default:
    return false;
  }
}

void successors(const Program &p, size_t i, std::vector<size_t> &out) {
  out.clear();
  const Instr &ins = p[i];
  switch (ins.kind) {
  case Instr::Kind::Jmp:
    if (ins.e->kind == Expr::Kind::Num) {
      if (ins.e->num < p.size())
        out.push_back(static_cast<size_t>(ins.e->num));
    } else {
      // Computed target: any label is reachable.
      for (size_t j = 0; j < p.size(); ++j)
        out.push_back(j);
    }
    break;
  case Instr::Kind::Beqz:
    if (!ins.target.is_end() && ins.target.bits() < p.size())
      out.push_back(static_cast<size_t>(ins.target.bits()));
    if (i + 1 < p.size())
      out.push_back(i + 1);
    break;
  default:
    if (i + 1 < p.size())
      out.push_back(i + 1);
    break;
  }
}

} // namespace

std::vector<std::string> program_regs(const Program &p) {
  std::set<std::string> names;
  std::vector<std::string> scratch;
  for (const Instr &ins : p) {
    scratch.clear();
    instr_reads(ins, scratch);
    for (auto &r : scratch)
      names.insert(r);
    std::string w;
    if (instr_writes(ins, w))
      names.insert(w);
  }
  return {names.begin(), names.end()};
}

std::vector<std::string> live_in_regs(const Program &p) {
  std::vector<std::set<std::string>> live(p.size());
  std::vector<std::string> reads;
  std::vector<size_t> succ;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t ii = p.size(); ii-- > 0;) {
      std::set<std::string> out;
      successors(p, ii, succ);
      for (size_t s : succ)
        out.insert(live[s].begin(), live[s].end());
      std::string killed;
      if (instr_writes(p[ii], killed))
        out.erase(killed);
      reads.clear();
      instr_reads(p[ii], reads);
      out.insert(reads.begin(), reads.end());
      if (out != live[ii]) {
        live[ii] = std::move(out);
        changed = true;
      }
    }
  }
  if (p.empty())
    return {};
  return {live[0].begin(), live[0].end()};
}

} // namespace mu
