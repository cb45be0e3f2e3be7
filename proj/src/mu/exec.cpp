#include "mu/exec.hpp"

namespace mu {

Value eval_expr(const Expr &e, const RegFile &regs, Width w) {
  switch (e.kind) {
  case Expr::Kind::Num:
    return Value::of(e.num, w);
  case Expr::Kind::Reg:
    return Value::of(regs.get(e.reg), w);
  case Expr::Kind::Un:
    return Value::of(apply_un(e.un, eval_expr(*e.a, regs, w).bits(), w), w);
  case Expr::Kind::Bin:
    return Value::of(apply_bin(e.bin, eval_expr(*e.a, regs, w).bits(),
                               eval_expr(*e.b, regs, w).bits(), w),
                     w);
  }
  return Value::of(0, w);
}

StepOut step(const Program &p, const Config &cfg, Width w) {
  StepOut out{cfg, {}};
  Config &c = out.cfg;
  uint64_t pc = cfg.pc.bits();
  if (pc >= p.size()) {
    c.pc = Value::end();
    return out;
  }
  const Instr &ins = p[pc];
  Value next = Value::of(pc + 1, w);
  switch (ins.kind) {
  case Instr::Kind::Skip:
  case Instr::Kind::Spbarr:
    c.pc = next;
    break;
  case Instr::Kind::Assign:
    c.regs.set(ins.reg, eval_expr(*ins.e, cfg.regs, w).bits());
    c.pc = next;
    break;
  case Instr::Kind::CondAssign:
    if (eval_expr(*ins.cond, cfg.regs, w).bits() == 0)
      c.regs.set(ins.reg, eval_expr(*ins.e, cfg.regs, w).bits());
    c.pc = next;
    break;
  case Instr::Kind::Load: {
    Value addr = eval_expr(*ins.e, cfg.regs, w);
    c.regs.set(ins.reg, cfg.mem.get(addr.bits()));
    c.pc = next;
    out.obs.push_back(Obs::load(addr));
    break;
  }
  case Instr::Kind::Store: {
    Value addr = eval_expr(*ins.e, cfg.regs, w);
    c.mem.set(addr.bits(), cfg.regs.get(ins.reg));
    c.pc = next;
    out.obs.push_back(Obs::store(addr));
    break;
  }
  case Instr::Kind::Jmp: {
    // Computed targets outside the program land on the terminated pc, so the
    // observation matches the label-or-end case split the symbolic executor
    // makes for the same jump.
    Value target = eval_expr(*ins.e, cfg.regs, w);
    if (target.bits() >= p.size())
      target = Value::end();
    c.pc = target;
    out.obs.push_back(Obs::pc(target));
    break;
  }
  case Instr::Kind::Beqz: {
    Value target =
        cfg.regs.get(ins.reg) == 0 ? ins.target : next;
    c.pc = target;
    out.obs.push_back(Obs::pc(target));
    break;
  }
  }
  return out;
}

RunOut run_nonspec(const Program &p, Config init, Width w, uint64_t fuel) {
  RunOut out;
  out.final_cfg = std::move(init);
  while (!is_final(out.final_cfg)) {
    if (out.steps >= fuel)
      throw FuelExhausted("run did not terminate within " +
                          std::to_string(fuel) + " steps");
    StepOut s = step(p, out.final_cfg, w);
    out.final_cfg = std::move(s.cfg);
    out.trace.insert(out.trace.end(), s.obs.begin(), s.obs.end());
    ++out.steps;
  }
  return out;
}

} // namespace mu
