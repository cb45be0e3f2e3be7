#include "mu/config.hpp"

namespace mu {

bool indistinguishable(const Config &a, const Config &b, const Policy &p) {
  for (const auto &r : p.regs)
    if (a.regs.get(r) != b.regs.get(r))
      return false;
  for (uint64_t addr : p.mems)
    if (a.mem.get(addr) != b.mem.get(addr))
      return false;
  return true;
}

} // namespace mu
