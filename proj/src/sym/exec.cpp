#include "sym/exec.hpp"

#include <cassert>
#include <sstream>

namespace sym {

std::string to_string(const SymObs &o) {
  switch (o.kind) {
  case SymObs::Kind::Load:
    return "load " + to_string(o.se);
  case SymObs::Kind::Store:
    return "store " + to_string(o.se);
  case SymObs::Kind::SymPc:
    return "sympc " + to_string(o.se);
  case SymObs::Kind::Pc:
    return "pc " + o.val.str();
  case SymObs::Kind::Start:
    return "start " + std::to_string(o.id);
  case SymObs::Kind::Commit:
    return "commit " + std::to_string(o.id);
  case SymObs::Kind::Rollback:
    return "rollback " + std::to_string(o.id);
  }
  return "";
}

std::string to_string(const SymTrace &t) {
  std::ostringstream os;
  for (const auto &o : t)
    os << to_string(o) << "\n";
  return os.str();
}

mu::Trace concretize(const SymTrace &t, const Valuation &v, Width w) {
  mu::Trace out;
  for (const auto &o : t) {
    switch (o.kind) {
    case SymObs::Kind::Load:
      out.push_back(mu::Obs::load(Value::of(eval(o.se, v, w), w)));
      break;
    case SymObs::Kind::Store:
      out.push_back(mu::Obs::store(Value::of(eval(o.se, v, w), w)));
      break;
    case SymObs::Kind::SymPc:
      break;
    case SymObs::Kind::Pc:
      out.push_back(mu::Obs::pc(o.val));
      break;
    case SymObs::Kind::Start:
      out.push_back(mu::Obs::start(o.id));
      break;
    case SymObs::Kind::Commit:
      out.push_back(mu::Obs::commit(o.id));
      break;
    case SymObs::Kind::Rollback:
      out.push_back(mu::Obs::rollback(o.id));
      break;
    }
  }
  return out;
}

std::vector<SE> path_condition(const SymTrace &t) {
  std::vector<SE> out;
  for (const auto &o : t)
    if (o.kind == SymObs::Kind::SymPc)
      out.push_back(o.se);
  return out;
}

bool is_final(const SymConfig &c) { return c.pc.is_end(); }

std::vector<SymStepOut> step_sym(const mu::Program &p, const SymConfig &cfg,
                                 Width w) {
  std::vector<SymStepOut> outs;
  assert(!is_final(cfg));
  uint64_t pc = cfg.pc.bits();
  if (pc >= p.size()) {
    SymStepOut o{cfg, {}};
    o.cfg.pc = Value::end();
    outs.push_back(std::move(o));
    return outs;
  }
  const mu::Instr &ins = p[pc];
  Value next = Value::of(pc + 1, w);
  SymStepOut o{cfg, {}};
  switch (ins.kind) {
  case mu::Instr::Kind::Skip:
  case mu::Instr::Kind::Spbarr:
    o.cfg.pc = next;
    outs.push_back(std::move(o));
    break;
  case mu::Instr::Kind::Assign:
    o.cfg.regs.set(ins.reg, eval_expr(*ins.e, cfg.regs, w));
    o.cfg.pc = next;
    outs.push_back(std::move(o));
    break;
  case mu::Instr::Kind::CondAssign: {
    SE c = eval_expr(*ins.cond, cfg.regs, w);
    SE val = eval_expr(*ins.e, cfg.regs, w);
    if (is_num(c)) {
      if (c->num == 0)
        o.cfg.regs.set(ins.reg, val);
    } else {
      SE zero = se_num(0, w);
      o.cfg.regs.set(ins.reg, se_ite(se_bin(mu::BinOp::Eq, c, zero, w), val,
                                     cfg.regs.get(ins.reg)));
    }
    o.cfg.pc = next;
    outs.push_back(std::move(o));
    break;
  }
  case mu::Instr::Kind::Load: {
    SE addr = eval_expr(*ins.e, cfg.regs, w);
    o.cfg.regs.set(ins.reg, se_read(cfg.mem, addr, w));
    o.cfg.pc = next;
    o.obs.push_back(SymObs::load(addr));
    outs.push_back(std::move(o));
    break;
  }
  case mu::Instr::Kind::Store: {
    SE addr = eval_expr(*ins.e, cfg.regs, w);
    o.cfg.mem = sm_write(cfg.mem, addr, cfg.regs.get(ins.reg));
    o.cfg.pc = next;
    o.obs.push_back(SymObs::store(addr));
    outs.push_back(std::move(o));
    break;
  }
  case mu::Instr::Kind::Jmp: {
    SE t = eval_expr(*ins.e, cfg.regs, w);
    if (is_num(t)) {
      Value target = t->num < p.size() ? Value::of(t->num, w) : Value::end();
      o.cfg.pc = target;
      o.obs.push_back(SymObs::sympc(se_num(1, w)));
      o.obs.push_back(SymObs::pc(target));
      outs.push_back(std::move(o));
      break;
    }
    // One successor per label, then the fall-off-the-end case under the
    // conjunction of all the inequalities.
    SE none = se_num(1, w);
    for (uint64_t l = 0; l < p.size(); ++l) {
      SE ln = se_num(l, w);
      SymStepOut s{cfg, {}};
      s.cfg.pc = Value::of(l, w);
      s.obs.push_back(SymObs::sympc(se_bin(mu::BinOp::Eq, t, ln, w)));
      s.obs.push_back(SymObs::pc(s.cfg.pc));
      outs.push_back(std::move(s));
      none = se_bin(mu::BinOp::And, none, se_bin(mu::BinOp::Ne, t, ln, w), w);
    }
    SymStepOut s{cfg, {}};
    s.cfg.pc = Value::end();
    s.obs.push_back(SymObs::sympc(none));
    s.obs.push_back(SymObs::pc(Value::end()));
    outs.push_back(std::move(s));
    break;
  }
  case mu::Instr::Kind::Beqz: {
    SE c = cfg.regs.get(ins.reg);
    if (is_num(c)) {
      Value target = c->num == 0 ? ins.target : next;
      o.cfg.pc = target;
      o.obs.push_back(SymObs::sympc(se_num(1, w)));
      o.obs.push_back(SymObs::pc(target));
      outs.push_back(std::move(o));
      break;
    }
    SE zero = se_num(0, w);
    SymStepOut taken{cfg, {}};
    taken.cfg.pc = ins.target;
    taken.obs.push_back(SymObs::sympc(se_bin(mu::BinOp::Eq, c, zero, w)));
    taken.obs.push_back(SymObs::pc(ins.target));
    outs.push_back(std::move(taken));
    SymStepOut fall{cfg, {}};
    fall.cfg.pc = next;
    fall.obs.push_back(SymObs::sympc(se_bin(mu::BinOp::Ne, c, zero, w)));
    fall.obs.push_back(SymObs::pc(next));
    outs.push_back(std::move(fall));
    break;
  }
  }
  return outs;
}

bool is_final(const SymAmConfig &c) {
  return c.stack.empty() && is_final(c.cfg);
}

namespace {

void decr_last(std::vector<SymTxn> &stack) {
  if (!stack.empty() && stack.back().remaining > 0)
    stack.back().remaining--;
}

void zero_last(std::vector<SymTxn> &stack) {
  if (!stack.empty())
    stack.back().remaining = 0;
}

} // namespace

std::vector<SymAmStepOut> step_sym_am(const mu::Program &p,
                                      const SymAmConfig &c, uint64_t window,
                                      Width w) {
  std::vector<SymAmStepOut> outs;
  assert(!is_final(c));

  // Exhausted innermost transaction: replay the snapshotted branch in the
  // correct direction and abandon the speculative suffix. The replayed step's
  // own observations are dropped; its assumption already sits in the trace
  // from when the transaction started.
  if (!c.stack.empty() && c.stack.back().remaining == 0) {
    SymTxn txn = c.stack.back();
    auto correct = step_sym(p, txn.snapshot, w);
    for (auto &s : correct) {
      if (s.cfg.pc == txn.predicted)
        continue;
      SymAmStepOut o;
      o.cfg.ctr = c.ctr;
      o.cfg.cfg = std::move(s.cfg);
      o.cfg.stack.assign(c.stack.begin(), c.stack.end() - 1);
      o.obs.push_back(SymObs::rollback(txn.id));
      o.obs.push_back(SymObs::pc(o.cfg.cfg.pc));
      outs.push_back(std::move(o));
    }
    assert(outs.size() == 1);
    return outs;
  }

  // Terminated program inside a transaction: idle while the window drains.
  if (is_final(c.cfg)) {
    SymAmStepOut o{c, {}};
    decr_last(o.cfg.stack);
    outs.push_back(std::move(o));
    return outs;
  }

  uint64_t pc = c.cfg.pc.bits();
  const mu::Instr *ins = pc < p.size() ? &p[pc] : nullptr;

  if (ins && ins->kind == mu::Instr::Kind::Beqz) {
    Value fall = Value::of(pc + 1, w);
    uint64_t budget = c.stack.empty()
                          ? window
                          : std::min(window, c.stack.back().remaining - 1);
    for (auto &s : step_sym(p, c.cfg, w)) {
      Value mispredicted = s.cfg.pc == fall ? ins->target : fall;
      SymAmStepOut o;
      o.cfg.ctr = c.ctr + 1;
      o.cfg.cfg = c.cfg;
      o.cfg.cfg.pc = mispredicted;
      o.cfg.stack = c.stack;
      decr_last(o.cfg.stack);
      o.cfg.stack.push_back(SymTxn{c.cfg, c.ctr, budget, mispredicted});
      o.obs.push_back(s.obs.front()); // the sympc assumption
      o.obs.push_back(SymObs::start(c.ctr));
      o.obs.push_back(SymObs::pc(mispredicted));
      outs.push_back(std::move(o));
    }
    return outs;
  }

  bool barrier = ins && ins->kind == mu::Instr::Kind::Spbarr;
  for (auto &s : step_sym(p, c.cfg, w)) {
    SymAmStepOut o;
    o.cfg.ctr = c.ctr;
    o.cfg.cfg = std::move(s.cfg);
    o.cfg.stack = c.stack;
    if (barrier)
      zero_last(o.cfg.stack);
    else
      decr_last(o.cfg.stack);
    o.obs = std::move(s.obs);
    outs.push_back(std::move(o));
  }
  return outs;
}

Feasibility assume_feasible(const std::vector<SE> &) {
  return Feasibility::Sat;
}

namespace {

struct PathNode {
  SymAmConfig cfg;
  SymTrace trace;
  std::vector<SE> conjuncts;
  uint64_t steps = 0;
};

// A successor is viable if its branch assumption (when it has one) is not a
// folded false and the pruner accepts the extended path condition.
struct Viability {
  bool keep = false;
  SE conjunct; // null when the assumption folded away
};

Viability viable(const SymAmStepOut &s, const std::vector<SE> &conjuncts,
                 const PathPruner &pruner, ExploreOut &out) {
  SE c;
  for (const auto &o : s.obs)
    if (o.kind == SymObs::Kind::SymPc)
      c = o.se;
  if (!c)
    return {true, nullptr};
  if (is_num(c))
    return {c->num != 0, nullptr};
  std::vector<SE> extended = conjuncts;
  extended.push_back(c);
  switch (pruner(extended)) {
  case Feasibility::Sat:
    return {true, c};
  case Feasibility::Unsat:
    return {false, nullptr};
  case Feasibility::Unknown:
    out.pruned_unknown = true;
    out.complete = false;
    return {false, nullptr};
  }
  return {false, nullptr};
}

void extend(PathNode &n, SymAmStepOut &&s, const Viability &v) {
  n.cfg = std::move(s.cfg);
  n.trace.insert(n.trace.end(), s.obs.begin(), s.obs.end());
  if (v.conjunct)
    n.conjuncts.push_back(v.conjunct);
  n.steps++;
}

} // namespace

ExploreOut explore(const mu::Program &p, uint64_t window, Width w,
                   const ExploreLimits &limits, const PathPruner &pruner) {
  ExploreOut out;
  std::vector<PathNode> pending;
  pending.push_back(PathNode{SymAmConfig::initial(sm_base()), {}, {}, 0});

  while (!pending.empty()) {
    if (out.runs.size() >= limits.max_paths) {
      out.complete = false;
      return out;
    }
    PathNode n = std::move(pending.back());
    pending.pop_back();

    for (;;) {
      if (is_final(n.cfg)) {
        out.runs.push_back(
            SymRun{std::move(n.trace), n.cfg.cfg, std::move(n.conjuncts)});
        break;
      }
      if (n.steps >= limits.max_steps) {
        out.complete = false;
        break;
      }
      auto succs = step_sym_am(p, n.cfg, window, w);
      std::vector<std::pair<size_t, Viability>> keep;
      for (size_t i = 0; i < succs.size(); ++i) {
        Viability v = viable(succs[i], n.conjuncts, pruner, out);
        if (v.keep)
          keep.emplace_back(i, v);
      }
      if (keep.empty())
        break;
      // Push the alternatives in reverse so the first one is explored next;
      // continue down the first successor without copying the prefix.
      for (size_t k = keep.size(); k-- > 1;) {
        PathNode alt = n;
        extend(alt, std::move(succs[keep[k].first]), keep[k].second);
        pending.push_back(std::move(alt));
      }
      extend(n, std::move(succs[keep[0].first]), keep[0].second);
    }
  }
  return out;
}

} // namespace sym
