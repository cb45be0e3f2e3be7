#include "smt/enum_solver.hpp"

#include "mu/value.hpp"

#include <cassert>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace smt {

namespace {

struct NeedCell {
  std::string arr;
  uint64_t addr;
};

struct BudgetExhausted {};

struct Eval {
  mu::Width w;
  uint64_t budget;
  std::map<std::string, uint64_t> scalars;
  std::map<std::string, std::map<uint64_t, uint64_t>> cells;

  uint64_t select(const TP &arr, uint64_t addr) {
    if (arr->kind == Term::Kind::Var) {
      auto &m = cells[arr->name];
      auto it = m.find(addr);
      if (it == m.end())
        throw NeedCell{arr->name, addr};
      return it->second;
    }
    assert(arr->op == Term::Op::Store);
    if (value(arr->args[1]) == addr)
      return value(arr->args[2]);
    return select(arr->args[0], addr);
  }

  uint64_t value(const TP &t) {
    switch (t->kind) {
    case Term::Kind::BoolConst:
      return t->bval ? 1 : 0;
    case Term::Kind::BvConst:
      return t->bits;
    case Term::Kind::Var: {
      auto it = scalars.find(t->name);
      if (it == scalars.end())
        throw std::runtime_error("unassigned variable " + t->name);
      return it->second;
    }
    case Term::Kind::App:
      break;
    }
    switch (t->op) {
    case Term::Op::Not:
      return value(t->args[0]) == 0 ? 1 : 0;
    case Term::Op::And:
      return value(t->args[0]) != 0 && value(t->args[1]) != 0 ? 1 : 0;
    case Term::Op::Or:
      return value(t->args[0]) != 0 || value(t->args[1]) != 0 ? 1 : 0;
    case Term::Op::Iff:
      return (value(t->args[0]) != 0) == (value(t->args[1]) != 0) ? 1 : 0;
    case Term::Op::Implies:
      return value(t->args[0]) == 0 || value(t->args[1]) != 0 ? 1 : 0;
    case Term::Op::Eq: {
      Sort s = infer_sort(t->args[0]);
      if (s.kind == Sort::Kind::Bool)
        return (value(t->args[0]) != 0) == (value(t->args[1]) != 0) ? 1 : 0;
      return value(t->args[0]) == value(t->args[1]) ? 1 : 0;
    }
    case Term::Op::Ite:
      return value(t->args[0]) != 0 ? value(t->args[1]) : value(t->args[2]);
    case Term::Op::BvNeg:
      return mu::apply_un(mu::UnOp::Neg, value(t->args[0]), w);
    case Term::Op::BvNot:
      return mu::apply_un(mu::UnOp::Not, value(t->args[0]), w);
    case Term::Op::BvAdd:
      return mu::apply_bin(mu::BinOp::Add, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvSub:
      return mu::apply_bin(mu::BinOp::Sub, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvMul:
      return mu::apply_bin(mu::BinOp::Mul, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvAnd:
      return mu::apply_bin(mu::BinOp::And, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvOr:
      return mu::apply_bin(mu::BinOp::Or, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvXor:
      return mu::apply_bin(mu::BinOp::Xor, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvShl:
      return mu::apply_bin(mu::BinOp::Shl, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvLshr:
      return mu::apply_bin(mu::BinOp::Shr, value(t->args[0]), value(t->args[1]), w);
    case Term::Op::BvUlt:
      return value(t->args[0]) < value(t->args[1]) ? 1 : 0;
    case Term::Op::BvUle:
      return value(t->args[0]) <= value(t->args[1]) ? 1 : 0;
    case Term::Op::Select:
      return select(t->args[0], value(t->args[1]));
    case Term::Op::Store:
      throw std::runtime_error("store outside select");
    }
    return 0;
  }

  // Evaluate the assertion, branching over values of any memory cell it
  // turns out to depend on.
  bool holds_with_cells(const TP &assertion) {
    if (budget == 0)
      throw BudgetExhausted{};
    budget--;
    try {
      return value(assertion) != 0;
    } catch (const NeedCell &nc) {
      for (uint64_t v = 0;; ++v) {
        cells[nc.arr][nc.addr] = v;
        if (holds_with_cells(assertion))
          return true;
        if (v == w.mask())
          break;
      }
      cells[nc.arr].erase(nc.addr);
      return false;
    }
  }
};

} // namespace

Result EnumSolver::check(const Query &q) {
  Result r;
  std::map<std::string, Sort> vars;
  collect_vars(q.assertion, vars);
  for (const auto &[name, term] : q.evals)
    collect_vars(term, vars);

  std::vector<std::string> scalar_names;
  for (const auto &[name, sort] : vars)
    if (sort.kind == Sort::Kind::Bv)
      scalar_names.push_back(name);

  Eval ev;
  ev.w = mu::Width{width_};
  ev.budget = budget_;

  // Depth-first over scalar assignments; cells are discovered inside.
  std::function<bool(size_t)> go = [&](size_t i) -> bool {
    if (i == scalar_names.size()) {
      ev.cells.clear();
      return ev.holds_with_cells(q.assertion);
    }
    for (uint64_t v = 0;; ++v) {
      ev.scalars[scalar_names[i]] = v;
      if (go(i + 1))
        return true;
      if (v == ev.w.mask())
        return false;
    }
  };

  try {
    if (!go(0)) {
      r.sat = Sat::Unsat;
      return r;
    }
  } catch (const BudgetExhausted &) {
    r.sat = Sat::Unknown;
    r.diag = "enumeration budget exhausted";
    return r;
  }

  r.sat = Sat::Sat;
  for (const auto &[name, term] : q.evals) {
    // Cells the satisfying assignment never touched stay free; fix them at 0.
    while (true) {
      try {
        r.model[name] = ev.value(term);
        break;
      } catch (const NeedCell &nc) {
        ev.cells[nc.arr][nc.addr] = 0;
      }
    }
  }
  return r;
}

} // namespace smt
