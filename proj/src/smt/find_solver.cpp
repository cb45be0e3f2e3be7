#include "smt/find_solver.hpp"

#include "smt/enum_solver.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#ifndef MUSNI_Z3_WRAPPER
#define MUSNI_Z3_WRAPPER ""
#endif

namespace smt {

namespace {

bool on_path(const std::string &exe) {
  const char *path = std::getenv("PATH");
  if (!path)
    return false;
  std::istringstream in(path);
  std::string dir;
  while (std::getline(in, dir, ':')) {
    if (dir.empty())
      continue;
    std::error_code ec;
    auto p = std::filesystem::path(dir) / exe;
    if (std::filesystem::exists(p, ec) &&
        !std::filesystem::is_directory(p, ec))
      return true;
  }
  return false;
}

FoundSolver from_request(const std::string &req, int timeout_ms,
                         unsigned width, const std::string &origin) {
  if (req == "enum")
    return {std::make_unique<EnumSolver>(width),
            "built-in enumeration (" + origin + ")"};
  return {std::make_unique<ExternalSolver>(req, timeout_ms),
          "'" + req + "' (" + origin + ")"};
}

} // namespace

FoundSolver find_solver(const std::string &prefer, int timeout_ms,
                        unsigned width) {
  if (!prefer.empty())
    return from_request(prefer, timeout_ms, width, "requested");
  if (const char *env = std::getenv("MUSNI_SOLVER"); env && *env)
    return from_request(env, timeout_ms, width, "MUSNI_SOLVER");
  if (on_path("z3"))
    return {std::make_unique<ExternalSolver>("z3 -in", timeout_ms),
            "z3 binary on PATH"};
  std::string wrapper = MUSNI_Z3_WRAPPER;
  std::error_code ec;
  if (!wrapper.empty() && std::filesystem::exists(wrapper, ec) &&
      on_path("node")) {
    auto deps = std::filesystem::path(wrapper).parent_path() / "node_modules";
    if (std::filesystem::exists(deps, ec))
      return {std::make_unique<ExternalSolver>("node " + wrapper, timeout_ms),
              "bundled z3 wasm wrapper"};
  }
  return {nullptr, "no solver found"};
}

} // namespace smt
