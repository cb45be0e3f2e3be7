#include "sni/check.hpp"

#include "smt/lower.hpp"
#include "sni/project.hpp"

#include <algorithm>
#include <set>

namespace sni {

const char *verdict_str(Verdict v) {
  switch (v) {
  case Verdict::Secure:
    return "SECURE";
  case Verdict::Insecure:
    return "INSECURE";
  case Verdict::Inconclusive:
    return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

using smt::TP;
using sym::SE;

std::string run_label(const char *tag, int copy, const std::string &suffix) {
  return std::string(tag) + "!" + std::to_string(copy) + "!" + suffix;
}

// Everything a query about one explored path needs: the payload expressions,
// the unknowns they mention, and the probe list for model readback.
struct RunContext {
  const sym::SymRun *run;
  sym::SymTrace nse, se;
  std::vector<SE> all_payloads;
  std::vector<std::string> syms;
  std::vector<SE> reads;
  std::vector<uint64_t> cell_addrs;
  mu::Width w;

  TP path_cond(int copy) const {
    TP acc = smt::mk_true();
    for (const auto &c : sym::path_condition(run->trace))
      acc = smt::mk_and(acc, smt::lower_truth(c, copy, w));
    return acc;
  }

  TP obs_equal(const sym::SymTrace &t) const {
    TP acc = smt::mk_true();
    for (const auto &o : t) {
      if (o.kind != sym::SymObs::Kind::Load &&
          o.kind != sym::SymObs::Kind::Store)
        continue;
      acc = smt::mk_and(acc, smt::mk_eq(smt::lower_word(o.se, 1, w),
                                        smt::lower_word(o.se, 2, w)));
    }
    return acc;
  }

  void add_evals(smt::Query &q) const {
    for (int copy = 1; copy <= 2; ++copy) {
      for (const auto &s : syms)
        q.evals.emplace_back(run_label("r", copy, s),
                             smt::mk_var(smt::var_name(s, copy),
                                         smt::Sort::bv(w.bits)));
      for (uint64_t a : cell_addrs)
        q.evals.emplace_back(
            run_label("c", copy, std::to_string(a)),
            smt::mk_select(smt::mk_var(smt::mem_name(copy),
                                       smt::Sort::array(w.bits)),
                           smt::mk_bv(a, w.bits)));
      for (size_t k = 0; k < reads.size(); ++k)
        q.evals.emplace_back(run_label("d", copy, std::to_string(k)),
                             smt::lower_word(reads[k], copy, w));
    }
  }

  sym::Valuation valuation(const smt::Result &r, int copy) const {
    sym::Valuation v;
    for (const auto &s : syms) {
      auto it = r.model.find(run_label("r", copy, s));
      if (it != r.model.end())
        v.syms[s] = it->second;
    }
    for (uint64_t a : cell_addrs) {
      auto it = r.model.find(run_label("c", copy, std::to_string(a)));
      if (it != r.model.end())
        v.cells[a] = it->second;
    }
    for (size_t k = 0; k < reads.size(); ++k) {
      auto it = r.model.find(run_label("d", copy, std::to_string(k)));
      if (it != r.model.end())
        v.read_values.emplace_back(reads[k], it->second);
    }
    return v;
  }
};

RunContext make_context(const sym::SymRun &run, const mu::Policy &policy,
                        const CheckOptions &opts) {
  RunContext ctx;
  ctx.run = &run;
  ctx.w = opts.width;
  ctx.nse = project_nonspec(run.trace);
  ctx.se = project_spec(run.trace);
  for (const auto &o : run.trace)
    if (o.se)
      ctx.all_payloads.push_back(o.se);

  std::vector<std::string> syms;
  for (const auto &e : ctx.all_payloads) {
    sym::collect_syms(e, syms);
    sym::collect_reads(e, ctx.reads);
  }
  for (const auto &r : policy.regs)
    syms.push_back(r);
  std::sort(syms.begin(), syms.end());
  syms.erase(std::unique(syms.begin(), syms.end()), syms.end());
  ctx.syms = std::move(syms);

  std::set<uint64_t> addrs(policy.mems.begin(), policy.mems.end());
  addrs.insert(opts.probe_cells.begin(), opts.probe_cells.end());
  ctx.cell_addrs.assign(addrs.begin(), addrs.end());
  return ctx;
}

TP policy_equal(const mu::Policy &policy, mu::Width w) {
  TP acc = smt::mk_true();
  for (const auto &r : policy.regs)
    acc = smt::mk_and(acc,
                      smt::mk_eq(smt::mk_var(smt::var_name(r, 1),
                                             smt::Sort::bv(w.bits)),
                                 smt::mk_var(smt::var_name(r, 2),
                                             smt::Sort::bv(w.bits))));
  for (uint64_t a : policy.mems) {
    TP idx = smt::mk_bv(a, w.bits);
    acc = smt::mk_and(
        acc,
        smt::mk_eq(smt::mk_select(smt::mk_var(smt::mem_name(1),
                                              smt::Sort::array(w.bits)),
                                  idx),
                   smt::mk_select(smt::mk_var(smt::mem_name(2),
                                              smt::Sort::array(w.bits)),
                                  idx)));
  }
  return acc;
}

Witness build_witness(const RunContext &ctx, const smt::Result &res,
                      std::size_t run_index, Witness::Kind kind,
                      std::size_t position) {
  Witness wit;
  wit.run_index = run_index;
  wit.kind = kind;
  wit.position = position;
  sym::Valuation v1 = ctx.valuation(res, 1);
  sym::Valuation v2 = ctx.valuation(res, 2);
  wit.first.regs = v1.syms;
  wit.first.cells = v1.cells;
  wit.first.am_trace = sym::concretize(ctx.run->trace, v1, ctx.w);
  wit.second.regs = v2.syms;
  wit.second.cells = v2.cells;
  wit.second.am_trace = sym::concretize(ctx.run->trace, v2, ctx.w);
  return wit;
}

// First speculative observation whose two concretizations differ.
std::size_t differing_obs(const RunContext &ctx, const smt::Result &res) {
  sym::Valuation v1 = ctx.valuation(res, 1);
  sym::Valuation v2 = ctx.valuation(res, 2);
  for (std::size_t i = 0; i < ctx.se.size(); ++i) {
    const auto &o = ctx.se[i];
    if (o.kind != sym::SymObs::Kind::Load &&
        o.kind != sym::SymObs::Kind::Store)
      continue;
    if (sym::eval(o.se, v1, ctx.w) != sym::eval(o.se, v2, ctx.w))
      return i;
  }
  return 0;
}

} // namespace

sym::PathPruner solver_pruner(smt::Solver &solver, mu::Width w,
                              uint64_t *queries) {
  return [&solver, w, queries](const std::vector<SE> &conjs) {
    TP acc = smt::mk_true();
    for (const auto &c : conjs)
      acc = smt::mk_and(acc, smt::lower_truth(c, 1, w));
    if (smt::is_const_bool(acc, true))
      return sym::Feasibility::Sat;
    if (smt::is_const_bool(acc, false))
      return sym::Feasibility::Unsat;
    if (queries)
      (*queries)++;
    switch (solver.check({acc, {}}).sat) {
    case smt::Sat::Sat:
      return sym::Feasibility::Sat;
    case smt::Sat::Unsat:
      return sym::Feasibility::Unsat;
    case smt::Sat::Unknown:
      return sym::Feasibility::Unknown;
    }
    return sym::Feasibility::Unknown;
  };
}

CheckOut check_sni(const mu::Program &p, const mu::Policy &policy,
                   smt::Solver &solver, const CheckOptions &opts) {
  CheckOut out;

  sym::PathPruner pruner = sym::assume_feasible;
  if (opts.prune_with_solver)
    pruner = solver_pruner(solver, opts.width, &out.solver_queries);

  sym::ExploreOut ex =
      sym::explore(p, opts.window, opts.width, opts.limits, pruner);
  out.paths = ex.runs.size();
  out.explored_all = ex.complete;
  if (!ex.complete)
    out.note = ex.pruned_unknown ? "a path condition came back unknown"
                                 : "path or step limit reached";

  bool any_unknown = false;
  TP pol = policy_equal(policy, opts.width);

  for (std::size_t ri = 0; ri < ex.runs.size(); ++ri) {
    RunContext ctx = make_context(ex.runs[ri], policy, opts);
    TP common = smt::mk_and(smt::mk_and(ctx.path_cond(1), ctx.path_cond(2)),
                            smt::mk_and(pol, ctx.obs_equal(ctx.nse)));

    // Can the two sides make speculative accesses at different addresses?
    TP mem_leak = smt::mk_and(common, smt::mk_not(ctx.obs_equal(ctx.se)));
    if (!smt::is_const_bool(mem_leak, false)) {
      smt::Query q{mem_leak, {}};
      ctx.add_evals(q);
      out.solver_queries++;
      smt::Result res = solver.check(q);
      if (res.sat == smt::Sat::Sat) {
        out.verdict = Verdict::Insecure;
        out.witness = build_witness(ctx, res, ri, Witness::Kind::Memory,
                                    differing_obs(ctx, res));
        return out;
      }
      if (res.sat == smt::Sat::Unknown)
        any_unknown = true;
    }

    // Can the two sides resolve a speculatively executed branch differently?
    // One query per branch condition of the mispredicted suffix, each under
    // the path condition of everything before it.
    TP prefix1 = smt::mk_true(), prefix2 = smt::mk_true();
    for (const auto &c : sym::path_condition(ctx.nse)) {
      prefix1 = smt::mk_and(prefix1, smt::lower_truth(c, 1, opts.width));
      prefix2 = smt::mk_and(prefix2, smt::lower_truth(c, 2, opts.width));
    }
    for (std::size_t i = 0; i < ctx.se.size(); ++i) {
      const auto &o = ctx.se[i];
      if (o.kind != sym::SymObs::Kind::SymPc)
        continue;
      TP b1 = smt::lower_truth(o.se, 1, opts.width);
      TP b2 = smt::lower_truth(o.se, 2, opts.width);
      TP ctrl_leak =
          smt::mk_and(smt::mk_and(prefix1, prefix2),
                      smt::mk_and(smt::mk_and(pol, ctx.obs_equal(ctx.nse)),
                                  smt::mk_not(smt::mk_iff(b1, b2))));
      if (!smt::is_const_bool(ctrl_leak, false)) {
        smt::Query q{ctrl_leak, {}};
        ctx.add_evals(q);
        out.solver_queries++;
        smt::Result res = solver.check(q);
        if (res.sat == smt::Sat::Sat) {
          out.verdict = Verdict::Insecure;
          out.witness =
              build_witness(ctx, res, ri, Witness::Kind::Control, i);
          return out;
        }
        if (res.sat == smt::Sat::Unknown)
          any_unknown = true;
      }
      prefix1 = smt::mk_and(prefix1, b1);
      prefix2 = smt::mk_and(prefix2, b2);
    }
  }

  if (any_unknown) {
    out.verdict = Verdict::Inconclusive;
    if (out.note.empty())
      out.note = "a leak query came back unknown";
    return out;
  }
  out.verdict = out.explored_all ? Verdict::Secure : Verdict::Inconclusive;
  return out;
}

} // namespace sni
