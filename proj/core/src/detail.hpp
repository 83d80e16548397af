#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "moa/array.hpp"

namespace moa::detail {

// Calls f with a value-initialized instance of the array's element type.
template <typename F>
decltype(auto) visit_type(ElementType type, F&& f) {
  if (type == ElementType::f64) return f(double{});
  return f(std::int64_t{});
}

template <typename F>
decltype(auto) visit_type(const DenseArray& a, F&& f) {
  return visit_type(a.element_type(), std::forward<F>(f));
}

// Row-major odometer step; returns false after the last index.
inline bool next_index(std::vector<extent_t>& idx, std::span<const extent_t> ext) {
  for (std::size_t d = idx.size(); d-- > 0;) {
    if (++idx[d] < ext[d]) return true;
    idx[d] = 0;
  }
  return false;
}

}  // namespace moa::detail
