#pragma once

// Shapes, index vectors, layout functions and the Psi indexing function.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "moa/error.hpp"

namespace moa {

using extent_t = std::int64_t;

/// Vector of non-negative extents. The empty shape is the shape of a scalar.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<extent_t> extents);
  explicit Shape(std::vector<extent_t> extents);

  std::span<const extent_t> extents() const noexcept { return extents_; }
  std::size_t dimensionality() const noexcept { return extents_.size(); }
  extent_t operator[](std::size_t d) const { return extents_.at(d); }

  /// Total component count; the empty product is 1.
  extent_t count() const noexcept;

  bool is_scalar() const noexcept { return extents_.empty(); }

  /// Shape with the leading `q` extents removed.
  Shape drop(std::size_t q) const;
  Shape concat(const Shape& other) const;

  std::string to_string() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<extent_t> extents_;
};

class IndexVector {
 public:
  IndexVector() = default;
  IndexVector(std::initializer_list<extent_t> coords) : coords_(coords) {}
  explicit IndexVector(std::vector<extent_t> coords)
      : coords_(std::move(coords)) {}

  std::span<const extent_t> coords() const noexcept { return coords_; }
  std::size_t size() const noexcept { return coords_.size(); }
  extent_t operator[](std::size_t d) const { return coords_.at(d); }

  /// Full or prefix index, componentwise inside the shape.
  bool valid_for(const Shape& s) const noexcept;
  bool full_for(const Shape& s) const noexcept {
    return valid_for(s) && coords_.size() == s.dimensionality();
  }

  std::string to_string() const;

  friend bool operator==(const IndexVector&, const IndexVector&) = default;

 private:
  std::vector<extent_t> coords_;
};

enum class Layout { row_major, col_major };

enum class ElementType { f64, i64 };

template <typename T>
concept Element = std::is_same_v<T, double> || std::is_same_v<T, std::int64_t>;

template <Element T>
constexpr ElementType element_type_of() {
  return std::is_same_v<T, double> ? ElementType::f64 : ElementType::i64;
}

/// A single element of either supported type.
using Scalar = std::variant<double, std::int64_t>;

/// Dense array value: a shape, a layout and the flat buffer holding rav of
/// the array under that layout. Immutable after construction.
class DenseArray {
 public:
  template <Element T>
  DenseArray(Shape shape, std::vector<T> data,
             Layout layout = Layout::row_major)
      : shape_(std::move(shape)), layout_(layout), data_(std::move(data)) {
    check_length();
  }

  template <Element T>
  static DenseArray scalar(T value) {
    return DenseArray(Shape{}, std::vector<T>{value});
  }
  static DenseArray scalar(const Scalar& value);

  template <Element T>
  static DenseArray zeros(Shape shape, Layout layout = Layout::row_major) {
    auto n = static_cast<std::size_t>(shape.count());
    return DenseArray(std::move(shape), std::vector<T>(n, T{0}), layout);
  }

  template <Element T>
  static DenseArray filled(Shape shape, T value,
                           Layout layout = Layout::row_major) {
    auto n = static_cast<std::size_t>(shape.count());
    return DenseArray(std::move(shape), std::vector<T>(n, value), layout);
  }

  /// Row-major matrix from nested rows; all rows must have equal length.
  template <Element T>
  static DenseArray matrix(std::initializer_list<std::initializer_list<T>> rows);

  template <Element T>
  static DenseArray vector(std::initializer_list<T> values) {
    return DenseArray(Shape{static_cast<extent_t>(values.size())},
                      std::vector<T>(values));
  }

  /// n x n identity matrix.
  template <Element T>
  static DenseArray identity(extent_t n);

  const Shape& shape() const noexcept { return shape_; }
  Layout layout() const noexcept { return layout_; }
  ElementType element_type() const noexcept {
    return data_.index() == 0 ? ElementType::f64 : ElementType::i64;
  }
  std::size_t size() const noexcept;

  /// Flat buffer. Throws type_mismatch when T is not the stored type.
  template <Element T>
  std::span<const T> data() const {
    if (const auto* v = std::get_if<std::vector<T>>(&data_)) return *v;
    throw Error(ErrorKind::type_mismatch, "array does not hold the requested element type");
  }

  /// Element at a flat offset, as a variant.
  Scalar at_offset(std::size_t offset) const;

  /// Value of a scalar (rank-0) array.
  template <Element T>
  T scalar_value() const;

  friend bool operator==(const DenseArray&, const DenseArray&) = default;

 private:
  void check_length() const;

  Shape shape_;
  Layout layout_;
  std::variant<std::vector<double>, std::vector<std::int64_t>> data_;
};

template <Element T>
DenseArray DenseArray::matrix(
    std::initializer_list<std::initializer_list<T>> rows) {
  std::vector<T> flat;
  extent_t cols = rows.size() == 0 ? 0 : static_cast<extent_t>(rows.begin()->size());
  for (const auto& row : rows) {
    if (static_cast<extent_t>(row.size()) != cols)
      throw Error(ErrorKind::shape_mismatch, "ragged matrix literal");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return DenseArray(Shape{static_cast<extent_t>(rows.size()), cols},
                    std::move(flat));
}

template <Element T>
DenseArray DenseArray::identity(extent_t n) {
  auto out = std::vector<T>(static_cast<std::size_t>(n * n), T{0});
  for (extent_t i = 0; i < n; ++i) out[static_cast<std::size_t>(i * n + i)] = T{1};
  return DenseArray(Shape{n, n}, std::move(out));
}

template <Element T>
T DenseArray::scalar_value() const {
  if (!shape_.is_scalar())
    throw Error(ErrorKind::rank, "scalar_value on array of shape " + shape_.to_string());
  return data<T>()[0];
}

Shape shape_of(const DenseArray& a);

/// Flat offset of a full index under a layout. Row-major is the Horner
/// evaluation ((i0*s1 + i1)*s2 + i2)...; column-major mirrors it with the
/// leading dimension fastest.
extent_t gamma(const IndexVector& idx, const Shape& s,
               Layout layout = Layout::row_major);

/// Unique full index whose gamma is `offset`.
IndexVector gamma_inverse(extent_t offset, const Shape& s,
                          Layout layout = Layout::row_major);

/// Flattened array of shape [pi(shape)], data in layout order.
DenseArray rav(const DenseArray& a);

/// All full valid indices of `s` in row-major enumeration order, as an i64
/// array of shape [pi(s), dimensionality(s)]. The empty shape yields one
/// empty index (shape [1, 0]).
DenseArray iota(const Shape& s);

/// Number of index rows in an iota result.
extent_t iota_count(const DenseArray& indices);
IndexVector iota_row(const DenseArray& indices, extent_t row);

/// Psi: a full index selects a scalar, a prefix index of length q selects
/// the subarray of shape drop(q) whose components extend the prefix. The
/// empty index returns the array itself.
DenseArray psi(const IndexVector& idx, const DenseArray& a);

/// Half-open range of flat offsets [begin, begin + count) occupied by a
/// prefix index under row-major layout. This is the contiguity that Psi
/// reduction exposes.
struct OffsetRange {
  extent_t begin = 0;
  extent_t count = 0;
};
OffsetRange prefix_range(const IndexVector& prefix, const Shape& s);

/// Same components re-laid out under `layout`.
DenseArray relayout(const DenseArray& a, Layout layout);

}  // namespace moa
