#pragma once

#include <cstddef>
#include <vector>

namespace sni {

// Splitting a speculative trace into what would have executed anyway and what
// only executed under a misprediction. A rolled-back span is everything
// between a start marker and the rollback with the same id; commit markers
// and unmatched starts carry no content of their own and are just removed.
//
// Works on both concrete and symbolic observation types: O needs kind,
// O::Kind::{Start,Rollback}, an id field and is_marker().

namespace detail {

template <class O>
std::ptrdiff_t matching_rollback(const std::vector<O> &t, std::size_t from) {
  const O &s = t[from];
  for (std::size_t j = from + 1; j < t.size(); ++j)
    if (t[j].kind == O::Kind::Rollback && t[j].id == s.id)
      return static_cast<std::ptrdiff_t>(j);
  return -1;
}

} // namespace detail

// Observations that survive when every rolled-back span is erased wholesale;
// the remaining transaction markers are dropped as well.
template <class O>
std::vector<O> project_nonspec(const std::vector<O> &t) {
  std::vector<O> out;
  std::size_t i = 0;
  while (i < t.size()) {
    const O &o = t[i];
    if (o.kind == O::Kind::Start) {
      std::ptrdiff_t j = detail::matching_rollback(t, i);
      if (j >= 0) {
        i = static_cast<std::size_t>(j) + 1;
        continue;
      }
    }
    if (!o.is_marker())
      out.push_back(o);
    i++;
  }
  return out;
}

// The complement: contents of the outermost rolled-back spans, in order,
// with nested markers filtered out.
template <class O>
std::vector<O> project_spec(const std::vector<O> &t) {
  std::vector<O> out;
  std::size_t i = 0;
  while (i < t.size()) {
    const O &o = t[i];
    if (o.kind == O::Kind::Start) {
      std::ptrdiff_t j = detail::matching_rollback(t, i);
      if (j >= 0) {
        for (std::size_t k = i + 1; k < static_cast<std::size_t>(j); ++k)
          if (!t[k].is_marker())
            out.push_back(t[k]);
        i = static_cast<std::size_t>(j) + 1;
        continue;
      }
    }
    i++;
  }
  return out;
}

} // namespace sni
