#pragma once

#include "mu/config.hpp"
#include "mu/program.hpp"
#include "mu/spec.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace sni {

// Exhaustive concrete check over a finite box of initial states: registers
// the program reads before writing and memory cells below mem_bound range
// over all width-bit values, everything else starts at zero. States are
// grouped by what the policy reveals plus the non-speculative trace; within
// a group the always-mispredict trace must be constant. A mismatch is a real
// counterexample; agreement is evidence only up to the box.
struct BruteOptions {
  uint64_t window = 2;
  mu::Width width{3};
  uint64_t mem_bound = 4;
  uint64_t fuel = 100000;
  uint64_t max_states = 1ull << 20;
};

struct BruteOut {
  enum class Verdict { Secure, Insecure, TooLarge };

  Verdict verdict = Verdict::Secure;
  uint64_t states = 0;
  std::optional<std::pair<mu::Config, mu::Config>> pair;
  mu::Trace trace_first, trace_second; // always-mispredict traces of the pair
};

BruteOut brute_sni(const mu::Program &p, const mu::Policy &policy,
                   const BruteOptions &opts);

} // namespace sni
