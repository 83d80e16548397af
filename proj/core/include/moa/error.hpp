#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace moa {

enum class ErrorKind {
  invalid_index,
  out_of_range,
  negative_extent,
  shape_mismatch,
  type_mismatch,
  rank,
  out_of_bounds,
  unbound_parameter,
  unknown_variable,
  name_collision,
  non_divisible,
  budget_too_small,
  zero_budget,
  invalid_argument,
  config_parse,
  io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// The single exception type thrown by the library. Callers that need to
/// distinguish failure modes switch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace moa
