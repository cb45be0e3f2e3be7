#pragma once

#include "smt/term.hpp"
#include "sym/expr.hpp"

namespace smt {

// Two-copy lowering for self-composition: the same symbolic expression maps
// to disjoint variable spaces per copy. Register unknowns become "<name>!<copy>"
// bitvector constants; the unconstrained initial memory becomes the array
// "mem!<copy>".
std::string var_name(const std::string &sym, int copy);
std::string mem_name(int copy);

TP lower_mem(const sym::SM &m, int copy, mu::Width w);

// The expression as a bitvector term.
TP lower_word(const sym::SE &e, int copy, mu::Width w);

// The expression as the proposition "e != 0", using direct logical structure
// where the expression is comparison-shaped.
TP lower_truth(const sym::SE &e, int copy, mu::Width w);

} // namespace smt
