#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "patchsim/config.hpp"

using namespace patchsim;
using nlohmann::json;

TEST(Config, EmptyObjectGivesDefaults) {
  const auto c = parse_config(json::object());
  EXPECT_EQ(c.pipeline.patch.k_p, 0.25);
  EXPECT_EQ(c.pipeline.test.k_t, 0.4);
  EXPECT_TRUE(c.pipeline.generate);
  EXPECT_EQ(c.pipeline.gen.seed, 20170u);
  EXPECT_EQ(c.pipeline.gen.max_selected, 20u);
  EXPECT_EQ(c.pipeline.prep.cap, 20000u);
  EXPECT_TRUE(c.pipeline.prep.collapse_repeats);
  EXPECT_EQ(c.pipeline.prep.overflow, OverflowPolicy::subsample);
  EXPECT_EQ(c.threads, 0u);
}

TEST(Config, Overrides) {
  const auto c = parse_config(json::parse(R"({
    "k_p": 0.5, "k_t": 0.1, "threads": 3,
    "generation": {"enabled": false, "seed": 7, "attempts": 50, "max_selected": 4},
    "runtime": {"fuel": 1000, "max_call_depth": 16},
    "lcs": {"collapse_repeats": false, "cap": 64, "overflow": "reject"}})"));
  const auto& p = c.pipeline;
  EXPECT_EQ(p.patch.k_p, 0.5);
  EXPECT_EQ(p.test.k_t, 0.1);
  EXPECT_EQ(c.threads, 3u);
  EXPECT_FALSE(p.generate);
  EXPECT_EQ(p.gen.seed, 7u);
  EXPECT_EQ(p.gen.attempts, 50u);
  EXPECT_EQ(p.gen.max_selected, 4u);
  EXPECT_EQ(p.run.fuel, 1000u);
  EXPECT_EQ(p.run.max_call_depth, 16u);
  // The generator runs candidates under the same runtime limits.
  EXPECT_EQ(p.gen.run.fuel, 1000u);
  EXPECT_FALSE(p.prep.collapse_repeats);
  EXPECT_EQ(p.prep.cap, 64u);
  EXPECT_EQ(p.prep.overflow, OverflowPolicy::reject);
}

TEST(Config, JsonRoundTrip) {
  auto c = parse_config(json::parse(R"({"k_p": 0.3, "lcs": {"overflow": "reject"}})"));
  EXPECT_EQ(config_json(parse_config(config_json(c))), config_json(c));
}

TEST(Config, Rejections) {
  for (const char* text : {R"({"kp": 0.3})", R"({"k_p": 1.5})", R"({"k_t": -0.1})", R"({"k_p": "high"})",
                           R"({"generation": {"seed": 1, "size": 3}})", R"({"runtime": {"fuel": 0}})",
                           R"({"lcs": {"overflow": "truncate"}})", R"({"lcs": 3})", R"([1, 2])"}) {
    EXPECT_THROW(parse_config(json::parse(text)), ConfigError) << text;
  }
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "patchsim_config_test.json";
  std::ofstream(path) << R"({"k_p": 0.15})";
  EXPECT_EQ(load_config(path).pipeline.patch.k_p, 0.15);
  std::ofstream(path) << "{oops";
  EXPECT_THROW(load_config(path), ConfigError);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), ConfigError);
}
