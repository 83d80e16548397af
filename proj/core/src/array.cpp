#include "moa/array.hpp"

#include <algorithm>
#include <sstream>

#include "detail.hpp"

namespace moa {

using detail::next_index;
using detail::visit_type;

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_index: return "invalid index";
    case ErrorKind::out_of_range: return "out of range";
    case ErrorKind::negative_extent: return "negative extent";
    case ErrorKind::shape_mismatch: return "shape mismatch";
    case ErrorKind::type_mismatch: return "type mismatch";
    case ErrorKind::rank: return "rank";
    case ErrorKind::out_of_bounds: return "out of bounds";
    case ErrorKind::unbound_parameter: return "unbound parameter";
    case ErrorKind::unknown_variable: return "unknown variable";
    case ErrorKind::name_collision: return "name collision";
    case ErrorKind::non_divisible: return "non-divisible";
    case ErrorKind::budget_too_small: return "budget too small";
    case ErrorKind::zero_budget: return "zero budget";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::config_parse: return "config parse";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

namespace {

template <typename Seq>
std::string bracketed(const Seq& seq) {
  std::ostringstream os;
  os << '[';
  bool first = true;
  for (auto v : seq) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  os << ']';
  return os.str();
}

void check_extents(std::span<const extent_t> extents) {
  for (auto e : extents)
    if (e < 0)
      throw Error(ErrorKind::negative_extent,
                  "negative extent " + std::to_string(e) + " in shape");
}

}  // namespace

Shape::Shape(std::initializer_list<extent_t> extents) : extents_(extents) {
  check_extents(extents_);
}

Shape::Shape(std::vector<extent_t> extents) : extents_(std::move(extents)) {
  check_extents(extents_);
}

extent_t Shape::count() const noexcept {
  extent_t n = 1;
  for (auto e : extents_) n *= e;
  return n;
}

Shape Shape::drop(std::size_t q) const {
  if (q > extents_.size())
    throw Error(ErrorKind::rank, "cannot drop " + std::to_string(q) +
                                     " extents from " + to_string());
  return Shape(std::vector<extent_t>(extents_.begin() + static_cast<std::ptrdiff_t>(q),
                                     extents_.end()));
}

Shape Shape::concat(const Shape& other) const {
  auto out = extents_;
  out.insert(out.end(), other.extents_.begin(), other.extents_.end());
  return Shape(std::move(out));
}

std::string Shape::to_string() const { return bracketed(extents_); }

bool IndexVector::valid_for(const Shape& s) const noexcept {
  if (coords_.size() > s.dimensionality()) return false;
  for (std::size_t d = 0; d < coords_.size(); ++d)
    if (coords_[d] < 0 || coords_[d] >= s.extents()[d]) return false;
  return true;
}

std::string IndexVector::to_string() const { return bracketed(coords_); }

DenseArray DenseArray::scalar(const Scalar& value) {
  return std::visit([](auto v) { return DenseArray::scalar(v); }, value);
}

std::size_t DenseArray::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, data_);
}

Scalar DenseArray::at_offset(std::size_t offset) const {
  return std::visit([&](const auto& v) -> Scalar { return v.at(offset); }, data_);
}

void DenseArray::check_length() const {
  if (static_cast<extent_t>(size()) != shape_.count())
    throw Error(ErrorKind::shape_mismatch,
                "buffer of length " + std::to_string(size()) +
                    " does not match shape " + shape_.to_string());
}

Shape shape_of(const DenseArray& a) { return a.shape(); }

extent_t gamma(const IndexVector& idx, const Shape& s, Layout layout) {
  if (!idx.full_for(s))
    throw Error(ErrorKind::invalid_index, "index " + idx.to_string() +
                                              " is not a full valid index for shape " +
                                              s.to_string());
  auto ext = s.extents();
  auto c = idx.coords();
  extent_t offset = 0;
  if (layout == Layout::row_major) {
    for (std::size_t d = 0; d < ext.size(); ++d) offset = offset * ext[d] + c[d];
  } else {
    for (std::size_t d = ext.size(); d-- > 0;) offset = offset * ext[d] + c[d];
  }
  return offset;
}

IndexVector gamma_inverse(extent_t offset, const Shape& s, Layout layout) {
  if (offset < 0 || offset >= s.count())
    throw Error(ErrorKind::out_of_range, "offset " + std::to_string(offset) +
                                             " outside [0, " +
                                             std::to_string(s.count()) + ")");
  auto ext = s.extents();
  std::vector<extent_t> coords(ext.size());
  if (layout == Layout::row_major) {
    for (std::size_t d = ext.size(); d-- > 0;) {
      coords[d] = offset % ext[d];
      offset /= ext[d];
    }
  } else {
    for (std::size_t d = 0; d < ext.size(); ++d) {
      coords[d] = offset % ext[d];
      offset /= ext[d];
    }
  }
  return IndexVector(std::move(coords));
}

DenseArray rav(const DenseArray& a) {
  return visit_type(a, [&]<typename T>(T) {
    auto src = a.data<T>();
    return DenseArray(Shape{static_cast<extent_t>(src.size())},
                      std::vector<T>(src.begin(), src.end()), a.layout());
  });
}

DenseArray iota(const Shape& s) {
  auto ext = s.extents();
  const auto rank = static_cast<extent_t>(ext.size());
  const extent_t n = s.count();
  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(n * rank));
  if (n > 0) {
    std::vector<extent_t> idx(ext.size(), 0);
    do {
      out.insert(out.end(), idx.begin(), idx.end());
    } while (next_index(idx, ext));
  }
  return DenseArray(Shape{n, rank}, std::move(out));
}

extent_t iota_count(const DenseArray& indices) { return indices.shape()[0]; }

IndexVector iota_row(const DenseArray& indices, extent_t row) {
  const auto rank = indices.shape()[1];
  auto flat = indices.data<std::int64_t>();
  auto first = flat.begin() + row * rank;
  return IndexVector(std::vector<extent_t>(first, first + rank));
}

OffsetRange prefix_range(const IndexVector& prefix, const Shape& s) {
  if (!prefix.valid_for(s))
    throw Error(ErrorKind::invalid_index, "index " + prefix.to_string() +
                                              " is not valid for shape " +
                                              s.to_string());
  auto ext = s.extents();
  extent_t begin = 0;
  for (std::size_t d = 0; d < ext.size(); ++d)
    begin = begin * ext[d] + (d < prefix.size() ? prefix[d] : 0);
  return {begin, s.drop(prefix.size()).count()};
}

DenseArray psi(const IndexVector& idx, const DenseArray& a) {
  const Shape& s = a.shape();
  if (!idx.valid_for(s))
    throw Error(ErrorKind::invalid_index, "index " + idx.to_string() +
                                              " is not valid for shape " +
                                              s.to_string());
  if (idx.size() == 0) return a;
  Shape sub = s.drop(idx.size());
  return visit_type(a, [&]<typename T>(T) {
    auto src = a.data<T>();
    if (a.layout() == Layout::row_major) {
      auto r = prefix_range(idx, s);
      auto first = src.begin() + r.begin;
      return DenseArray(std::move(sub), std::vector<T>(first, first + r.count),
                        a.layout());
    }
    // Column-major subarrays are strided; gather them in the subarray's own
    // column-major order.
    std::vector<T> out(static_cast<std::size_t>(sub.count()));
    std::vector<extent_t> full(idx.coords().begin(), idx.coords().end());
    full.resize(s.dimensionality(), 0);
    for (extent_t off = 0; off < sub.count(); ++off) {
      auto tail = gamma_inverse(off, sub, Layout::col_major);
      std::copy(tail.coords().begin(), tail.coords().end(),
                full.begin() + static_cast<std::ptrdiff_t>(idx.size()));
      out[static_cast<std::size_t>(off)] =
          src[static_cast<std::size_t>(gamma(IndexVector(full), s, Layout::col_major))];
    }
    return DenseArray(std::move(sub), std::move(out), a.layout());
  });
}

DenseArray relayout(const DenseArray& a, Layout layout) {
  if (a.layout() == layout) return a;
  const Shape& s = a.shape();
  return visit_type(a, [&]<typename T>(T) {
    auto src = a.data<T>();
    std::vector<T> out(src.size());
    for (extent_t off = 0; off < s.count(); ++off) {
      auto idx = gamma_inverse(off, s, a.layout());
      out[static_cast<std::size_t>(gamma(idx, s, layout))] = src[static_cast<std::size_t>(off)];
    }
    return DenseArray(s, std::move(out), layout);
  });
}

}  // namespace moa
