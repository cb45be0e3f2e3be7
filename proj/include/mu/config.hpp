#pragma once

#include "mu/value.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <string>

namespace mu {

// Total register map with default 0. Zero-valued slots are erased so that
// equality of the underlying maps is equality of the total functions.
struct RegFile {
  std::map<std::string, uint64_t> slots;

  uint64_t get(const std::string &r) const {
    auto it = slots.find(r);
    return it == slots.end() ? 0 : it->second;
  }
  void set(const std::string &r, uint64_t v) {
    if (v == 0)
      slots.erase(r);
    else
      slots[r] = v;
  }

  friend bool operator==(const RegFile &, const RegFile &) = default;
};

// Total memory over the full word-sized address space, default 0.
struct Memory {
  std::map<uint64_t, uint64_t> cells;

  uint64_t get(uint64_t addr) const {
    auto it = cells.find(addr);
    return it == cells.end() ? 0 : it->second;
  }
  void set(uint64_t addr, uint64_t v) {
    if (v == 0)
      cells.erase(addr);
    else
      cells[addr] = v;
  }

  friend bool operator==(const Memory &, const Memory &) = default;
};

struct Config {
  Value pc; // Value::of(0, w) initially; end when terminated
  RegFile regs;
  Memory mem;

  friend bool operator==(const Config &, const Config &) = default;
};

inline bool is_final(const Config &c) { return c.pc.is_end(); }

// Security policy: which registers and memory addresses the adversary is
// allowed to know initially. Everything else is secret.
struct Policy {
  std::set<std::string> regs;
  std::set<uint64_t> mems;
};

// Two configurations agree on all public registers and addresses.
bool indistinguishable(const Config &a, const Config &b, const Policy &p);

} // namespace mu
