#include "mu/trace.hpp"

namespace mu {

std::string to_string(const Obs &o) {
  switch (o.kind) {
  case Obs::Kind::Load:
    return "load " + o.val.str();
  case Obs::Kind::Store:
    return "store " + o.val.str();
  case Obs::Kind::Pc:
    return "pc " + o.val.str();
  case Obs::Kind::Start:
    return "start " + std::to_string(o.id);
  case Obs::Kind::Commit:
    return "commit " + std::to_string(o.id);
  case Obs::Kind::Rollback:
    return "rollback " + std::to_string(o.id);
  }
  return "?";
}

std::string to_string(const Trace &t) {
  std::string out;
  for (const Obs &o : t) {
    out += to_string(o);
    out += '\n';
  }
  return out;
}

} // namespace mu
