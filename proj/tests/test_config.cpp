#include <gtest/gtest.h>

#include <string>

#include "tilefuse/config.hpp"
#include "tilefuse/error.hpp"

namespace tilefuse {
namespace {

std::string error_of(const std::string& toml) {
  try {
    parse_config(toml, "test");
  } catch (const UsageError& e) {
    return e.what();
  }
  return "";
}

const std::string kOnePipeline = R"(
[[pipeline]]
name = "p"
scale = 1.0
overlap_px = 0
confidence_threshold = 0.1
backend = "vanilla-sr"
)";

TEST(Config, DefaultIsTheFivePipelineEnsemble) {
  auto c = default_config();
  ASSERT_EQ(c.pipelines.size(), 5u);
  const double thresholds[] = {0.15, 0.06, 0.5, 0.06, 0.06};
  const double scales[] = {1.0, 1.3, 0.7, 1.0, 0.6};
  const int overlaps[] = {0, 0, 100, 100, 0};
  const char* backends[] = {"vanilla-sr", "vanilla-sr", "multires-mr", "multires-mr",
                            "multires-mr"};
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(c.pipelines[i].confidence_threshold, thresholds[i]);
    EXPECT_EQ(c.pipelines[i].scale.value(), scales[i]);
    EXPECT_EQ(c.pipelines[i].overlap_px, overlaps[i]);
    EXPECT_EQ(c.pipelines[i].backend, backends[i]);
  }
  EXPECT_EQ(c.pipelines[4].size_groups, (SizeGroupSet{SizeGroup::Large}));
  EXPECT_EQ(c.fusion.sigma, 0.5);
  EXPECT_EQ(c.fusion.metric, OverlapMetric::IoU);
  EXPECT_EQ(c.fusion.mode, FusionMode::WeightedMerge);
  EXPECT_EQ(c.fusion.scope, CategoryScope::PerCategory);
  EXPECT_EQ(c.budget.per_image_seconds, 2400.0);
  EXPECT_EQ(c.budget.total_seconds, 259200.0);
  EXPECT_EQ(c.budget.memory_bytes, 8ULL << 30);
  const auto* mr = c.find_backend("multires-mr");
  ASSERT_NE(mr, nullptr);
  EXPECT_EQ(mr->tile_sizes, (std::vector<int>{300, 400, 500}));
}

TEST(Config, MinimalPipelineTakesDefaults) {
  auto c = parse_config(kOnePipeline);
  ASSERT_EQ(c.pipelines.size(), 1u);
  EXPECT_EQ(c.pipelines[0].size_groups, kAllSizeGroups);
  EXPECT_EQ(c.fusion.sigma, 0.5);
}

TEST(Config, OverlapFractionUsesSmallestTile) {
  auto c = parse_config(R"(
[[pipeline]]
name = "p"
scale = 1.0
overlap_fraction = 0.25
confidence_threshold = 0.1
backend = "multires-mr"
)");
  EXPECT_EQ(c.pipelines[0].overlap_px, 75);
}

TEST(Config, BackendOverridesAndAdditions) {
  auto c = parse_config(kOnePipeline + R"(
[backend.vanilla-sr]
jitter_px = 2.5
tp_confidence = [0.4, 0.9]

[backend.remote]
kind = "external"
command = "/bin/true"
tile_sizes = [512]
timeout_seconds = 3
)");
  const auto* sr = c.find_backend("vanilla-sr");
  EXPECT_EQ(sr->synthetic.jitter_px, 2.5);
  EXPECT_EQ(sr->synthetic.true_positive.lo, 0.4);
  EXPECT_EQ(sr->tile_sizes, (std::vector<int>{300}));
  const auto* remote = c.find_backend("remote");
  ASSERT_NE(remote, nullptr);
  EXPECT_EQ(remote->kind, BackendKind::External);
  EXPECT_EQ(remote->tile_sizes, (std::vector<int>{512}));
}

TEST(Config, FusionAndBudgetTables) {
  auto c = parse_config(kOnePipeline + R"(
[fusion]
sigma = 0.3
metric = "intersection-score"
mode = "select"
category_scope = "agnostic"

[budget]
per_image_seconds = 1.5
total_seconds = 60
memory_bytes = 1024
)");
  EXPECT_EQ(c.fusion.sigma, 0.3);
  EXPECT_EQ(c.fusion.metric, OverlapMetric::IntersectionScore);
  EXPECT_EQ(c.fusion.mode, FusionMode::Select);
  EXPECT_EQ(c.fusion.scope, CategoryScope::CategoryAgnostic);
  EXPECT_EQ(c.budget.per_image_seconds, 1.5);
  EXPECT_EQ(c.budget.memory_bytes, 1024u);
}

TEST(Config, ErrorsNameTheKey) {
  auto replace = [](std::string s, const std::string& from, const std::string& to) {
    s.replace(s.find(from), from.size(), to);
    return s;
  };
  EXPECT_NE(error_of(replace(kOnePipeline, "threshold = 0.1", "threshold = 1.5"))
                .find("pipeline[0].confidence_threshold"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kOnePipeline, "scale = 1.0", "scale = 0")).find("scale"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kOnePipeline, "overlap_px = 0", "overlap_px = 300"))
                .find("overlap"),
            std::string::npos);
  EXPECT_NE(error_of(replace(kOnePipeline, "vanilla-sr", "nope")).find("nope"),
            std::string::npos);
  EXPECT_NE(error_of(kOnePipeline + "colour = 1\n").find("unknown key"), std::string::npos);
  EXPECT_NE(error_of(kOnePipeline + "[fusion]\nsigma = 1.0\n").find("fusion.sigma"),
            std::string::npos);
  EXPECT_NE(error_of(kOnePipeline + "[fusion]\nmetric = \"dice\"\n").find("metric"),
            std::string::npos);
  EXPECT_NE(error_of(kOnePipeline + kOnePipeline).find("duplicate"), std::string::npos);
  EXPECT_NE(error_of("[fusion]\nsigma = 0.5\n").find("pipeline"), std::string::npos);
  EXPECT_NE(error_of("[[pipeline\n"), "");
  EXPECT_NE(error_of(kOnePipeline + "[backend.x]\nkind = \"external\"\n").find("command"),
            std::string::npos);
}

TEST(Config, LoadFromFile) {
  EXPECT_EQ(load_config(TILEFUSE_SOURCE_DIR "/config/default.toml").pipelines.size(), 5u);
  EXPECT_THROW(load_config("/nonexistent/x.toml"), UsageError);
}

}  // namespace
}  // namespace tilefuse
