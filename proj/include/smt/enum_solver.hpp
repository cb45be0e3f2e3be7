#pragma once

#include "smt/solver.hpp"

namespace smt {

// Decides queries by exhaustive enumeration: every bitvector variable ranges
// over the full 2^width domain, and array cells are enumerated lazily, only
// for indices the assertion actually touches under the current assignment.
// Intended for narrow widths in tests and as an independent cross-check of
// external solvers; gives up with Unknown once the work budget is spent.
class EnumSolver : public Solver {
public:
  explicit EnumSolver(unsigned width, uint64_t budget = 1ull << 24)
      : width_(width), budget_(budget) {}

  Result check(const Query &q) override;
  std::string describe() const override {
    return "enumeration over " + std::to_string(width_) + "-bit words";
  }

private:
  unsigned width_;
  uint64_t budget_;
};

} // namespace smt
