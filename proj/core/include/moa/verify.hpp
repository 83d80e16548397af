#pragma once

// Exhaustive small-instance oracle harness: every GEMM route in the library
// is compared against gemm_naive on random integer matrices, where agreement
// must be bitwise.

#include <cstdint>
#include <string>
#include <vector>

namespace moa {

struct VerifyOptions {
  std::int64_t max_dim = 6;
  std::uint64_t seed = 42;
  /// Random (A, B) pairs per (m, n, p).
  int draws = 1;
  /// Random shapes for the psi identity check.
  int psi_shapes = 100;
  /// Adds one to the B offset of every blocked nest. Mutation smoke test.
  bool inject_fault = false;
};

struct VerifyFailure {
  std::string check;
  std::int64_t m = 0, n = 0, p = 0;
  std::string config;  // e.g. "block=2x1x2", empty when not applicable
  std::string detail;

  std::string describe() const;
};

struct VerifyReport {
  std::int64_t passed = 0;
  std::int64_t failed = 0;
  std::vector<VerifyFailure> failures;

  bool ok() const noexcept { return failed == 0; }
};

VerifyReport verify_all(const VerifyOptions& options);

}  // namespace moa
