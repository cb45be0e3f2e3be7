#include "mu/spec.hpp"

#include <algorithm>
#include <cassert>

namespace mu {

namespace {

Value branch_target_of(const Program &p, uint64_t pc) {
  return p[pc].target;
}

void check_contract(const Program &p, uint64_t pc, const Value &predicted,
                    Width w) {
  Value fall = Value::of(pc + 1, w);
  if (predicted != fall && predicted != branch_target_of(p, pc))
    throw OracleContractViolation(
        "prediction for branch at " + std::to_string(pc) +
        " is neither the target nor the fall-through");
}

void decr_all(std::vector<Txn> &s) {
  for (Txn &t : s)
    if (t.remaining > 0)
      --t.remaining;
}

void zero_all(std::vector<Txn> &s) {
  for (Txn &t : s)
    t.remaining = 0;
}

} // namespace

Oracle always_taken_oracle(uint64_t window) {
  return [window](const Program &p, const History &, uint64_t pc) {
    return Prediction{branch_target_of(p, pc), window};
  };
}

Oracle always_not_taken_oracle(uint64_t window) {
  return [window](const Program &, const History &, uint64_t pc) {
    return Prediction{Value::of(pc + 1, Width{64}), window};
  };
}

Oracle btfnt_oracle(uint64_t window) {
  return [window](const Program &p, const History &, uint64_t pc) {
    Value target = branch_target_of(p, pc);
    Value fall = Value::of(pc + 1, Width{64});
    if (target.is_end() || target.bits() >= fall.bits())
      return Prediction{fall, window};
    return Prediction{target, window};
  };
}

SpecStepOut step_spec(const Program &p, const SpecConfig &c, const Oracle &o,
                      Width w) {
  SpecStepOut out{c, {}};
  SpecConfig &n = out.cfg;

  // A drained transaction resolves first. The rules only allow resolving an
  // entry whose younger neighbours all have budget left, which pins the
  // rightmost zero-window entry.
  for (size_t i = n.stack.size(); i-- > 0;) {
    if (n.stack[i].remaining != 0)
      continue;
    const Txn txn = n.stack[i];
    assert(!is_final(txn.snapshot) &&
           p[txn.snapshot.pc.bits()].kind == Instr::Kind::Beqz);
    StepOut correct = step(p, txn.snapshot, w);
    n.hist.push_back({txn.snapshot.pc.bits(), txn.id, correct.cfg.pc});
    if (correct.cfg.pc == txn.predicted) {
      out.obs.push_back(Obs::commit(txn.id));
      n.stack.erase(n.stack.begin() + static_cast<ptrdiff_t>(i));
    } else {
      out.obs.push_back(Obs::rollback(txn.id));
      out.obs.push_back(Obs::pc(correct.cfg.pc));
      n.cfg = correct.cfg;
      n.stack.resize(i); // nested transactions vanish with their parent
    }
    return out;
  }

  if (is_final(n.cfg)) {
    // Terminated fetch inside speculation: idle while the windows drain.
    decr_all(n.stack);
    return out;
  }

  uint64_t pc = n.cfg.pc.bits();
  if (pc < p.size() && p[pc].kind == Instr::Kind::Beqz) {
    Prediction pred = o(p, n.hist, pc);
    check_contract(p, pc, pred.target, w);
    uint64_t id = n.ctr++;
    out.obs.push_back(Obs::start(id));
    out.obs.push_back(Obs::pc(pred.target));
    n.hist.push_back({pc, id, pred.target});
    decr_all(n.stack);
    n.stack.push_back(Txn{n.cfg, id, pred.window, pred.target});
    n.cfg.pc = pred.target;
    return out;
  }

  bool barrier = pc < p.size() && p[pc].kind == Instr::Kind::Spbarr;
  StepOut s = step(p, n.cfg, w);
  n.cfg = std::move(s.cfg);
  out.obs = std::move(s.obs);
  if (barrier)
    zero_all(n.stack);
  else
    decr_all(n.stack);
  return out;
}

RunOut run_spec(const Program &p, Config init, const Oracle &o, Width w,
                uint64_t fuel) {
  SpecConfig c;
  c.cfg = std::move(init);
  RunOut out;
  while (!is_final(c)) {
    if (out.steps >= fuel)
      throw FuelExhausted("speculative run did not terminate within " +
                          std::to_string(fuel) + " steps");
    SpecStepOut s = step_spec(p, c, o, w);
    c = std::move(s.cfg);
    out.trace.insert(out.trace.end(), s.obs.begin(), s.obs.end());
    ++out.steps;
  }
  out.final_cfg = std::move(c.cfg);
  return out;
}

AmStepOut step_am(const Program &p, const AmConfig &c, uint64_t window,
                  Width w) {
  AmStepOut out{c, {}};
  AmConfig &n = out.cfg;

  if (!n.stack.empty() && n.stack.back().remaining == 0) {
    const Txn txn = n.stack.back();
    n.stack.pop_back();
    StepOut correct = step(p, txn.snapshot, w);
    assert(correct.cfg.pc != txn.predicted);
    out.obs.push_back(Obs::rollback(txn.id));
    out.obs.push_back(Obs::pc(correct.cfg.pc));
    n.cfg = correct.cfg;
    return out;
  }

  if (is_final(n.cfg)) {
    assert(!n.stack.empty());
    if (n.stack.back().remaining > 0)
      --n.stack.back().remaining;
    return out;
  }

  uint64_t pc = n.cfg.pc.bits();
  if (pc < p.size() && p[pc].kind == Instr::Kind::Beqz) {
    const Instr &ins = p[pc];
    Value fall = Value::of(pc + 1, w);
    Value mispredicted =
        n.cfg.regs.get(ins.reg) == 0 ? fall : ins.target;
    uint64_t budget = window;
    if (!n.stack.empty()) {
      budget = std::min(window, n.stack.back().remaining - 1);
      --n.stack.back().remaining;
    }
    uint64_t id = n.ctr++;
    out.obs.push_back(Obs::start(id));
    out.obs.push_back(Obs::pc(mispredicted));
    n.stack.push_back(Txn{n.cfg, id, budget, mispredicted});
    n.cfg.pc = mispredicted;
    return out;
  }

  bool barrier = pc < p.size() && p[pc].kind == Instr::Kind::Spbarr;
  StepOut s = step(p, n.cfg, w);
  n.cfg = std::move(s.cfg);
  out.obs = std::move(s.obs);
  if (!n.stack.empty()) {
    if (barrier)
      n.stack.back().remaining = 0;
    else if (n.stack.back().remaining > 0)
      --n.stack.back().remaining;
  }
  return out;
}

RunOut run_am(const Program &p, Config init, uint64_t window, Width w,
              uint64_t fuel) {
  AmConfig c;
  c.cfg = std::move(init);
  RunOut out;
  while (!is_final(c)) {
    if (out.steps >= fuel)
      throw FuelExhausted("always-mispredict run did not terminate within " +
                          std::to_string(fuel) + " steps");
    AmStepOut s = step_am(p, c, window, w);
    c = std::move(s.cfg);
    out.trace.insert(out.trace.end(), s.obs.begin(), s.obs.end());
    ++out.steps;
  }
  out.final_cfg = std::move(c.cfg);
  return out;
}

} // namespace mu
