#include "sni/brute.hpp"

#include "mu/exec.hpp"

#include <map>
#include <sstream>
#include <vector>

namespace sni {

namespace {

// What a policy-level observer can see of an initial state, paired with the
// non-speculative trace. Two states with equal keys must produce equal
// speculative traces for the program to be judged secure.
std::string group_key(const mu::Config &c, const mu::Policy &policy,
                      const mu::Trace &nonspec) {
  std::ostringstream os;
  for (const auto &r : policy.regs)
    os << r << "=" << c.regs.get(r) << ";";
  for (uint64_t a : policy.mems)
    os << "[" << a << "]=" << c.mem.get(a) << ";";
  os << "|" << mu::to_string(nonspec);
  return os.str();
}

} // namespace

BruteOut brute_sni(const mu::Program &p, const mu::Policy &policy,
                   const BruteOptions &opts) {
  BruteOut out;
  mu::Width w = opts.width;

  std::vector<std::string> regs = mu::live_in_regs(p);
  uint64_t domain = w.mask() + 1;
  // domain^(regs + cells), with overflow care
  double space = 1.0;
  for (size_t i = 0; i < regs.size() + opts.mem_bound; ++i)
    space *= static_cast<double>(domain);
  if (space > static_cast<double>(opts.max_states)) {
    out.verdict = BruteOut::Verdict::TooLarge;
    return out;
  }

  struct Group {
    mu::Config init;
    mu::Trace am;
  };
  std::map<std::string, Group> groups;

  uint64_t total = static_cast<uint64_t>(space);
  std::vector<uint64_t> assign(regs.size() + opts.mem_bound, 0);
  for (uint64_t n = 0; n < total; ++n) {
    uint64_t acc = n;
    for (auto &v : assign) {
      v = acc % domain;
      acc /= domain;
    }
    mu::Config init;
    for (size_t i = 0; i < regs.size(); ++i)
      init.regs.set(regs[i], assign[i]);
    for (uint64_t a = 0; a < opts.mem_bound; ++a)
      init.mem.set(a, assign[regs.size() + a]);

    mu::RunOut ns = mu::run_nonspec(p, init, w, opts.fuel);
    mu::RunOut am = mu::run_am(p, init, opts.window, w, opts.fuel);
    out.states++;

    std::string key = group_key(init, policy, ns.trace);
    auto [it, inserted] = groups.emplace(key, Group{init, am.trace});
    if (!inserted && it->second.am != am.trace) {
      out.verdict = BruteOut::Verdict::Insecure;
      out.pair = {it->second.init, init};
      out.trace_first = it->second.am;
      out.trace_second = am.trace;
      return out;
    }
  }
  return out;
}

} // namespace sni
