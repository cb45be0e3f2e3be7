#pragma once

#include <cstdint>
#include <string>

namespace mu {

// Machine word width in bits. All arithmetic wraps modulo 2^bits.
struct Width {
  unsigned bits = 64;

  uint64_t mask() const { return bits >= 64 ? ~0ull : (1ull << bits) - 1ull; }
  uint64_t trunc(uint64_t v) const { return v & mask(); }
};

// A machine word, or the distinguished end marker that only the program
// counter can hold. The end marker prints as "end" in the text formats.
class Value {
public:
  Value() = default;

  static Value end() {
    Value v;
    v.end_ = true;
    return v;
  }
  static Value of(uint64_t bits, Width w) {
    Value v;
    v.bits_ = w.trunc(bits);
    return v;
  }

  bool is_end() const { return end_; }
  uint64_t bits() const { return bits_; }

  friend bool operator==(const Value &a, const Value &b) {
    return a.end_ == b.end_ && (a.end_ || a.bits_ == b.bits_);
  }
  friend bool operator!=(const Value &a, const Value &b) { return !(a == b); }

  std::string str() const { return end_ ? "end" : std::to_string(bits_); }

private:
  uint64_t bits_ = 0;
  bool end_ = false;
};

enum class UnOp { Neg, Not };
enum class BinOp { Add, Sub, Mul, And, Or, Xor, Shl, Shr, Lt, Le, Eq, Ne };

// Word semantics shared by the interpreters and the constant folder.
// Comparisons yield 1 or 0; shifts by >= width yield 0; everything wraps.
uint64_t apply_un(UnOp op, uint64_t a, Width w);
uint64_t apply_bin(BinOp op, uint64_t a, uint64_t b, Width w);

const char *un_op_str(UnOp op);
const char *bin_op_str(BinOp op);

} // namespace mu
