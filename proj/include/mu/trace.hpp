#pragma once

#include "mu/value.hpp"

#include <string>
#include <vector>

namespace mu {

// Adversary-visible events. Load/Store expose the accessed address, Pc the
// control-flow target; Start/Commit/Rollback bracket speculative
// transactions by id.
struct Obs {
  enum class Kind { Load, Store, Pc, Start, Commit, Rollback };

  Kind kind = Kind::Pc;
  Value val;       // Load/Store/Pc payload
  uint64_t id = 0; // Start/Commit/Rollback transaction id

  static Obs load(Value v) { return {Kind::Load, v, 0}; }
  static Obs store(Value v) { return {Kind::Store, v, 0}; }
  static Obs pc(Value v) { return {Kind::Pc, v, 0}; }
  static Obs start(uint64_t id) { return {Kind::Start, Value{}, id}; }
  static Obs commit(uint64_t id) { return {Kind::Commit, Value{}, id}; }
  static Obs rollback(uint64_t id) { return {Kind::Rollback, Value{}, id}; }

  bool is_marker() const {
    return kind == Kind::Start || kind == Kind::Commit || kind == Kind::Rollback;
  }

  friend bool operator==(const Obs &a, const Obs &b) {
    return a.kind == b.kind && a.val == b.val && a.id == b.id;
  }
  friend bool operator!=(const Obs &a, const Obs &b) { return !(a == b); }
};

using Trace = std::vector<Obs>;

std::string to_string(const Obs &o);

// One observation per line.
std::string to_string(const Trace &t);

} // namespace mu
