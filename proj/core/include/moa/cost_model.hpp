#pragma once

// Block-size selection from a declarative hardware shape. The working set
// of one block multiply is three blocks (A, B and C) that must fit an L1
// budget together.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace moa {

struct HardwareShape {
  std::string name;
  std::int64_t l1_budget_bytes = 0;  // per-SM working budget
  std::int64_t l1_full_bytes = 0;    // L1 including shared memory
  std::int64_t l2_bytes = 0;
  std::int64_t global_bytes = 0;
  std::int64_t sm_count = 0;

  /// Throws invalid_argument unless all sizes are positive and
  /// l1_budget <= l1_full <= l2 <= global.
  void validate() const;

  /// NVIDIA V100: 32 KiB L1 working budget, 128 KiB L1 with shared
  /// memory, 6 MiB L2, 80 SMs, 16 or 32 GiB global memory.
  static HardwareShape v100_16g();
  static HardwareShape v100_32g();

  friend bool operator==(const HardwareShape&, const HardwareShape&) = default;
};

/// Built-in preset by name ("v100-16g", "v100-32g"); throws
/// invalid_argument for an unknown name.
HardwareShape hardware_preset(std::string_view name);

/// Parses a JSON object with the keys name, l1_budget_bytes, l1_full_bytes,
/// l2_bytes, global_bytes and sm_count. Throws config_parse naming the
/// offending key for a missing, unknown or mistyped key.
HardwareShape parse_hardware(std::string_view json_text);
std::string to_json(const HardwareShape& hw);
HardwareShape load_hardware(const std::filesystem::path& path);

struct BlockPlan {
  std::int64_t block_rows = 0;
  std::int64_t block_cols = 0;
  std::int64_t elem_bytes = 0;
  std::int64_t blocks_per_sm = 3;  // A, B and C
  std::int64_t bytes_per_block = 0;
  std::int64_t total_bytes = 0;
  std::int64_t budget_bytes = 0;

  std::int64_t components() const noexcept { return block_rows * block_cols; }
};

/// Largest power-of-two square block b with 3 * b * b * elem_bytes within
/// the budget. elem_bytes must be 4 or 8.
BlockPlan select_block(std::int64_t budget_bytes, std::int64_t elem_bytes);
BlockPlan select_block(const HardwareShape& hw, std::int64_t elem_bytes);

/// Every (rows, cols) with rows * cols == component_count, rows descending.
std::vector<std::pair<std::int64_t, std::int64_t>> enumerate_block_shapes(
    std::int64_t component_count);

/// Largest square matrix side N whose n_matrices-matrix working set fits
/// the budget: floor(sqrt(budget / (n_matrices * elem_bytes))).
std::int64_t predict_switch_threshold(std::int64_t budget_bytes, std::int64_t elem_bytes,
                                      std::int64_t n_matrices);

/// Budget taken as an equal share of global memory among
/// `global_share_divisor` devices (8 GPUs per node by default).
std::int64_t global_share_budget(const HardwareShape& hw,
                                 std::int64_t global_share_divisor = 8);

std::int64_t predict_switch_threshold(const HardwareShape& hw, std::int64_t elem_bytes,
                                      std::int64_t n_matrices,
                                      std::int64_t global_share_divisor = 8);

}  // namespace moa
