#include "mu/value.hpp"

namespace mu {

uint64_t apply_un(UnOp op, uint64_t a, Width w) {
  switch (op) {
  case UnOp::Neg:
    return w.trunc(~a + 1ull);
  case UnOp::Not:
    return w.trunc(~a);
  }
  return 0;
}

uint64_t apply_bin(BinOp op, uint64_t a, uint64_t b, Width w) {
  a = w.trunc(a);
  b = w.trunc(b);
  switch (op) {
  case BinOp::Add:
    return w.trunc(a + b);
  case BinOp::Sub:
    return w.trunc(a - b);
  case BinOp::Mul:
    return w.trunc(a * b);
  case BinOp::And:
    return a & b;
  case BinOp::Or:
    return a | b;
  case BinOp::Xor:
    return a ^ b;
  case BinOp::Shl:
    return b >= w.bits ? 0 : w.trunc(a << b);
  case BinOp::Shr:
    return b >= w.bits ? 0 : a >> b;
  case BinOp::Lt:
    return a < b ? 1 : 0;
  case BinOp::Le:
    return a <= b ? 1 : 0;
  case BinOp::Eq:
    return a == b ? 1 : 0;
  case BinOp::Ne:
    return a != b ? 1 : 0;
  }
  return 0;
}

const char *un_op_str(UnOp op) { return op == UnOp::Neg ? "-" : "~"; }

const char *bin_op_str(BinOp op) {
  switch (op) {
  case BinOp::Add:
    return "+";
  case BinOp::Sub:
    return "-";
  case BinOp::Mul:
    return "*";
  case BinOp::And:
    return "&";
  case BinOp::Or:
    return "|";
  case BinOp::Xor:
    return "^";
  case BinOp::Shl:
    return "<<";
  case BinOp::Shr:
    return ">>";
  case BinOp::Lt:
    return "<";
  case BinOp::Le:
    return "<=";
  case BinOp::Eq:
    return "=";
  case BinOp::Ne:
    return "!=";
  }
  return "?";
}

} // namespace mu
