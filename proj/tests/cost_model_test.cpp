#include <cmath>

#include <gtest/gtest.h>

#include "moa/cost_model.hpp"
#include "moa/error.hpp"

namespace moa {
namespace {

TEST(SelectBlockTest, V100DoublePrecision) {
  const auto plan = select_block(HardwareShape::v100_16g(), 8);
  EXPECT_EQ(plan.block_rows, 32);
  EXPECT_EQ(plan.block_cols, 32);
  EXPECT_EQ(plan.components(), 1024);
  EXPECT_EQ(plan.bytes_per_block, 8192);
  EXPECT_EQ(plan.total_bytes, 24576);
  EXPECT_EQ(plan.budget_bytes, 32768);
}

TEST(SelectBlockTest, FullL1AndSinglePrecision) {
  EXPECT_EQ(select_block(128 * 1024, 8).block_rows, 64);
  EXPECT_EQ(select_block(32 * 1024, 4).block_rows, 32);
  EXPECT_EQ(select_block(24, 8).block_rows, 1);
}

TEST(SelectBlockTest, ChosenSideIsMaximalPowerOfTwo) {
  for (std::int64_t budget = 24; budget <= 1 << 20; budget = budget * 3 / 2 + 7)
    for (std::int64_t elem : {4, 8}) {
      if (3 * elem > budget) continue;
      const auto b = select_block(budget, elem).block_rows;
      EXPECT_EQ(b & (b - 1), 0);
      EXPECT_LE(3 * b * b * elem, budget);
      EXPECT_GT(3 * (2 * b) * (2 * b) * elem, budget);
    }
}

TEST(SelectBlockTest, Errors) {
  EXPECT_THROW((void)select_block(0, 8), Error);
  try {
    (void)select_block(23, 8);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::budget_too_small);
  }
  EXPECT_THROW((void)select_block(1024, 2), Error);
}

TEST(EnumerateBlockShapesTest, PowerOfTwoFactorPairsOf1024) {
  const auto shapes = enumerate_block_shapes(1024);
  ASSERT_EQ(shapes.size(), 11u);
  for (std::size_t k = 0; k < shapes.size(); ++k) {
    EXPECT_EQ(shapes[k].first, std::int64_t{1024} >> k);
    EXPECT_EQ(shapes[k].first * shapes[k].second, 1024);
  }
  for (const auto& want : {std::pair<std::int64_t, std::int64_t>{32, 32}, {16, 64}, {8, 128}})
    EXPECT_NE(std::find(shapes.begin(), shapes.end(), want), shapes.end());
}

TEST(EnumerateBlockShapesTest, NonPowerOfTwo) {
  EXPECT_EQ(enumerate_block_shapes(6),
            (std::vector<std::pair<std::int64_t, std::int64_t>>{{6, 1}, {3, 2}, {2, 3}, {1, 6}}));
  EXPECT_THROW((void)enumerate_block_shapes(0), Error);
}

TEST(SwitchThresholdTest, TwoGibibyteShare) {
  const std::int64_t budget = std::int64_t{2} << 30;
  const auto n = predict_switch_threshold(budget, 8, 3);
  EXPECT_EQ(n, 9459);
  EXPECT_LE(std::abs(static_cast<double>(n) - 9216.0) / 9216.0, 0.03);
  EXPECT_EQ(global_share_budget(HardwareShape::v100_16g()), budget);
  EXPECT_EQ(predict_switch_threshold(HardwareShape::v100_16g(), 8, 3), 9459);
}

TEST(SwitchThresholdTest, SmallBudgetsAndMonotonicity) {
  EXPECT_EQ(predict_switch_threshold(24, 8, 3), 1);
  EXPECT_EQ(predict_switch_threshold(23, 8, 3), 0);
  std::int64_t prev = 0;
  for (std::int64_t budget = 1; budget < 1 << 22; budget = budget * 2 + 1) {
    const auto n = predict_switch_threshold(budget, 8, 3);
    EXPECT_GE(n, prev);
    EXPECT_LE(3 * n * n * 8, budget);
    EXPECT_GT(3 * (n + 1) * (n + 1) * 8, budget);
    prev = n;
  }
}

TEST(SwitchThresholdTest, ZeroBudget) {
  try {
    (void)predict_switch_threshold(0, 8, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::zero_budget);
  }
}

TEST(HardwareShapeTest, PresetValues) {
  const auto hw = HardwareShape::v100_16g();
  EXPECT_EQ(hw.l1_budget_bytes, 32 * 1024);
  EXPECT_EQ(hw.l1_full_bytes, 128 * 1024);
  EXPECT_EQ(hw.l2_bytes, 6 * 1024 * 1024);
  EXPECT_EQ(hw.global_bytes, std::int64_t{16} << 30);
  EXPECT_EQ(hw.sm_count, 80);
  EXPECT_EQ(HardwareShape::v100_32g().global_bytes, std::int64_t{32} << 30);
  EXPECT_EQ(hardware_preset("v100-32g"), HardwareShape::v100_32g());
  EXPECT_THROW((void)hardware_preset("a100"), Error);
}

TEST(HardwareShapeTest, JsonRoundTrip) {
  for (const auto& hw : {HardwareShape::v100_16g(), HardwareShape::v100_32g()})
    EXPECT_EQ(parse_hardware(to_json(hw)), hw);
}

TEST(HardwareShapeTest, ShippedPresetsMatchBuiltins) {
  EXPECT_EQ(load_hardware(MOA_PRESET_DIR "/v100-16g.json"), HardwareShape::v100_16g());
  EXPECT_EQ(load_hardware(MOA_PRESET_DIR "/v100-32g.json"), HardwareShape::v100_32g());
}

void expect_parse_error(const std::string& text, const std::string& key) {
  try {
    (void)parse_hardware(text);
    ADD_FAILURE() << "accepted " << text;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config_parse);
    EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
  }
}

TEST(HardwareShapeTest, ParseErrorsNameTheKey) {
  const std::string rest =
      R"("l1_full_bytes": 131072, "l2_bytes": 6291456, "global_bytes": 17179869184, "sm_count": 80)";
  expect_parse_error(R"({"name": "x", )" + rest + "}", "l1_budget_bytes");
  expect_parse_error(R"({"name": "x", "l1_budget_bytes": "32K", )" + rest + "}", "l1_budget_bytes");
  expect_parse_error(R"({"name": "x", "l1_budget_bytes": 32768, "bogus": 1, )" + rest + "}", "bogus");
  expect_parse_error(R"({"name": 3, "l1_budget_bytes": 32768, )" + rest + "}", "name");
  expect_parse_error("{not json", "JSON");
}

TEST(HardwareShapeTest, ValidateOrdering) {
  auto hw = HardwareShape::v100_16g();
  hw.l1_budget_bytes = hw.l1_full_bytes * 2;
  EXPECT_THROW(hw.validate(), Error);
  hw = HardwareShape::v100_16g();
  hw.sm_count = 0;
  EXPECT_THROW(hw.validate(), Error);
}

}  // namespace
}  // namespace moa
