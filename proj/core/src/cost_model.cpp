#include "moa/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "moa/error.hpp"

namespace moa {

namespace {

constexpr std::int64_t kib = 1024;
constexpr std::int64_t mib = 1024 * kib;
constexpr std::int64_t gib = 1024 * mib;

constexpr const char* size_keys[] = {"l1_budget_bytes", "l1_full_bytes", "l2_bytes",
                                     "global_bytes", "sm_count"};

void require_elem_bytes(std::int64_t elem_bytes) {
  if (elem_bytes != 4 && elem_bytes != 8)
    throw Error(ErrorKind::invalid_argument,
                "element width must be 4 or 8 bytes, got " + std::to_string(elem_bytes));
}

}  // namespace

void HardwareShape::validate() const {
  const std::int64_t sizes[] = {l1_budget_bytes, l1_full_bytes, l2_bytes, global_bytes, sm_count};
  for (std::size_t k = 0; k < std::size(sizes); ++k)
    if (sizes[k] <= 0)
      throw Error(ErrorKind::invalid_argument,
                  std::string(size_keys[k]) + " must be positive, got " + std::to_string(sizes[k]));
  if (l1_budget_bytes > l1_full_bytes)
    throw Error(ErrorKind::invalid_argument, "l1_budget_bytes exceeds l1_full_bytes");
  if (l1_full_bytes > l2_bytes)
    throw Error(ErrorKind::invalid_argument, "l1_full_bytes exceeds l2_bytes");
  if (l2_bytes > global_bytes)
    throw Error(ErrorKind::invalid_argument, "l2_bytes exceeds global_bytes");
}

HardwareShape HardwareShape::v100_16g() {
  return {"v100-16g", 32 * kib, 128 * kib, 6 * mib, 16 * gib, 80};
}

HardwareShape HardwareShape::v100_32g() {
  return {"v100-32g", 32 * kib, 128 * kib, 6 * mib, 32 * gib, 80};
}

HardwareShape hardware_preset(std::string_view name) {
  if (name == "v100-16g") return HardwareShape::v100_16g();
  if (name == "v100-32g") return HardwareShape::v100_32g();
  throw Error(ErrorKind::invalid_argument, "unknown hardware preset '" + std::string(name) + "'");
}

HardwareShape parse_hardware(std::string_view json_text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config_parse, std::string("hardware config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object())
    throw Error(ErrorKind::config_parse, "hardware config must be a JSON object");

  for (const auto& [key, value] : doc.items()) {
    const bool known = key == "name" || std::find(std::begin(size_keys), std::end(size_keys),
                                                  key) != std::end(size_keys);
    if (!known) throw Error(ErrorKind::config_parse, "unknown key '" + key + "' in hardware config");
  }

  HardwareShape hw;
  if (!doc.contains("name") || !doc["name"].is_string())
    throw Error(ErrorKind::config_parse, "key 'name' must be a string");
  hw.name = doc["name"].get<std::string>();
  std::int64_t* fields[] = {&hw.l1_budget_bytes, &hw.l1_full_bytes, &hw.l2_bytes,
                            &hw.global_bytes, &hw.sm_count};
  for (std::size_t k = 0; k < std::size(size_keys); ++k) {
    const char* key = size_keys[k];
    if (!doc.contains(key))
      throw Error(ErrorKind::config_parse, std::string("missing key '") + key + "'");
    const auto& v = doc[key];
    if (!v.is_number_integer() || v.get<std::int64_t>() <= 0)
      throw Error(ErrorKind::config_parse, std::string("key '") + key + "' must be a positive integer");
    *fields[k] = v.get<std::int64_t>();
  }
  try {
    hw.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::config_parse, e.what());
  }
  return hw;
}

std::string to_json(const HardwareShape& hw) {
  nlohmann::ordered_json doc;
  doc["name"] = hw.name;
  doc["l1_budget_bytes"] = hw.l1_budget_bytes;
  doc["l1_full_bytes"] = hw.l1_full_bytes;
  doc["l2_bytes"] = hw.l2_bytes;
  doc["global_bytes"] = hw.global_bytes;
  doc["sm_count"] = hw.sm_count;
  return doc.dump(2) + "\n";
}

HardwareShape load_hardware(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open hardware config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_hardware(text.str());
}

BlockPlan select_block(std::int64_t budget_bytes, std::int64_t elem_bytes) {
  require_elem_bytes(elem_bytes);
  constexpr std::int64_t blocks = 3;
  auto fits = [&](std::int64_t side) { return blocks * side * side * elem_bytes <= budget_bytes; };
  if (!fits(1))
    throw Error(ErrorKind::budget_too_small,
                "budget of " + std::to_string(budget_bytes) + " bytes cannot hold three " +
                    std::to_string(elem_bytes) + "-byte elements");
  std::int64_t side = 1;
  while (fits(side * 2)) side *= 2;
  BlockPlan plan;
  plan.block_rows = side;
  plan.block_cols = side;
  plan.elem_bytes = elem_bytes;
  plan.blocks_per_sm = blocks;
  plan.bytes_per_block = side * side * elem_bytes;
  plan.total_bytes = blocks * plan.bytes_per_block;
  plan.budget_bytes = budget_bytes;
  return plan;
}

BlockPlan select_block(const HardwareShape& hw, std::int64_t elem_bytes) {
  return select_block(hw.l1_budget_bytes, elem_bytes);
}

std::vector<std::pair<std::int64_t, std::int64_t>> enumerate_block_shapes(
    std::int64_t component_count) {
  if (component_count < 1)
    throw Error(ErrorKind::invalid_argument, "component count must be at least 1");
  std::vector<std::pair<std::int64_t, std::int64_t>> out;
  for (std::int64_t rows = component_count; rows >= 1; --rows)
    if (component_count % rows == 0) out.emplace_back(rows, component_count / rows);
  return out;
}

std::int64_t predict_switch_threshold(std::int64_t budget_bytes, std::int64_t elem_bytes,
                                      std::int64_t n_matrices) {
  if (budget_bytes <= 0) throw Error(ErrorKind::zero_budget, "memory budget must be positive");
  if (n_matrices < 1) throw Error(ErrorKind::invalid_argument, "need at least one matrix");
  if (elem_bytes < 1) throw Error(ErrorKind::invalid_argument, "element width must be positive");
  // floor(sqrt(x)) == floor(sqrt(floor(x))), so integer division is exact here.
  const std::int64_t cells = budget_bytes / (n_matrices * elem_bytes);
  auto side = static_cast<std::int64_t>(std::sqrt(static_cast<double>(cells)));
  while (side * side > cells) --side;
  while ((side + 1) * (side + 1) <= cells) ++side;
  return side;
}

std::int64_t global_share_budget(const HardwareShape& hw, std::int64_t global_share_divisor) {
  if (global_share_divisor < 1)
    throw Error(ErrorKind::invalid_argument, "global share divisor must be at least 1");
  return hw.global_bytes / global_share_divisor;
}

std::int64_t predict_switch_threshold(const HardwareShape& hw, std::int64_t elem_bytes,
                                      std::int64_t n_matrices,
                                      std::int64_t global_share_divisor) {
  return predict_switch_threshold(global_share_budget(hw, global_share_divisor), elem_bytes,
                                  n_matrices);
}

}  // namespace moa
