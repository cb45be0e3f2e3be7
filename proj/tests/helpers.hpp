#pragma once

#include "mu/config.hpp"
#include "mu/parse.hpp"
#include "mu/program.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace testutil {

inline std::string read_file(const std::string &path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture_path(const std::string &name) {
  return std::string(MUSNI_FIXTURE_DIR) + "/" + name;
}

inline std::string fixture(const std::string &name) {
  return read_file(fixture_path(name));
}

inline mu::Program prog(const std::string &text) {
  return mu::parse_program(text);
}

// Initial configuration at label 0 with the given register/memory seeds.
inline mu::Config cfg(mu::Width w,
                      std::initializer_list<std::pair<const char *, uint64_t>>
                          regs = {},
    std::initializer_list<std::pair<uint64_t, uint64_t>> mems = {}) {
  mu::Config c;
  c.pc = mu::Value::of(0, w);
  for (auto &[r, v] : regs)
    c.regs.set(r, w.trunc(v));
  for (auto &[a, v] : mems)
    c.mem.set(a, w.trunc(v));
  return c;
}

} // namespace testutil
