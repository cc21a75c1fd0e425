#include <gtest/gtest.h>

#include "tilefuse/categories.hpp"
#include "tilefuse/detector.hpp"
#include "tilefuse/error.hpp"
#include "tilefuse/synthetic_detector.hpp"

namespace tilefuse {
namespace {

const int kBus = *category_by_name("bus");
const int kBarge = *category_by_name("barge");

TileSpec tile_at(int x, int y, int size = 300) { return {x, y, size, size, y / size, x / size, false}; }

TEST(SyntheticDetect, PerfectRecoversInteriorTruth) {
  std::vector<GroundTruthObject> gt{{{310, 20, 350, 60}, kBus}, {{400, 100, 500, 180}, kBarge}};
  auto out = synthetic_detect(gt, tile_at(300, 0), {}, "img");
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].box, (BBox{10, 20, 50, 60}));
  EXPECT_EQ(out[0].category, kBus);
  EXPECT_EQ(out[0].confidence, 1.0);
  EXPECT_EQ(out[1].box, (BBox{100, 100, 200, 180}));
}

TEST(SyntheticDetect, DropAllYieldsNothing) {
  std::vector<GroundTruthObject> gt{{{10, 10, 50, 50}, kBus}};
  SyntheticDetectorParams p;
  p.drop_rate = 1.0;
  EXPECT_TRUE(synthetic_detect(gt, tile_at(0, 0), p, "img").empty());
}

TEST(SyntheticDetect, Deterministic) {
  std::vector<GroundTruthObject> gt;
  for (int i = 0; i < 20; ++i) gt.push_back({{i * 14.0, i * 10.0, i * 14.0 + 12, i * 10.0 + 9}, 1 + i});
  SyntheticDetectorParams p;
  p.jitter_px = 3;
  p.drop_rate = 0.3;
  p.fp_rate = 2;
  p.true_positive = {0.4, 1.0};
  p.seed = 12345;
  auto a = synthetic_detect(gt, tile_at(0, 0), p, "img");
  auto b = synthetic_detect(gt, tile_at(0, 0), p, "img");
  EXPECT_EQ(a, b);
  auto c = synthetic_detect(gt, tile_at(0, 0), p, "other-image");
  EXPECT_NE(a, c);
}

TEST(SyntheticDetect, OutsideTileNeverEmitted) {
  std::vector<GroundTruthObject> gt{{{700, 700, 750, 750}, kBus}};
  EXPECT_TRUE(synthetic_detect(gt, tile_at(0, 0), {}, "img").empty());
}

TEST(SyntheticDetect, VisibilityThreshold) {
  // 20% of the object inside the tile: not emitted. 50%: emitted and clipped.
  std::vector<GroundTruthObject> sliver{{{290, 0, 340, 10}, kBus}};
  EXPECT_TRUE(synthetic_detect(sliver, tile_at(0, 0), {}, "img").empty());
  std::vector<GroundTruthObject> half{{{280, 0, 320, 10}, kBus}};
  auto out = synthetic_detect(half, tile_at(0, 0), {}, "img");
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BBox{280, 0, 300, 10}));
}

TEST(SyntheticDetect, DropRateMonteCarlo) {
  std::vector<GroundTruthObject> gt{{{10, 10, 50, 50}, kBus}};
  SyntheticDetectorParams p;
  p.drop_rate = 0.5;
  int kept = 0;
  const int trials = 10000;
  for (int i = 0; i < trials; ++i) {
    kept += !synthetic_detect(gt, tile_at(0, 0), p, "trial-" + std::to_string(i)).empty();
  }
  // Binomial sd is 0.005; 0.02 is four sd.
  EXPECT_NEAR(kept / double(trials), 0.5, 0.02);
}

TEST(SyntheticDetect, EmittedBoxesStayInTile) {
  std::vector<GroundTruthObject> gt;
  for (int i = 0; i < 30; ++i) gt.push_back({{i * 11.0 - 20, i * 9.0 - 10, i * 11.0 + 30, i * 9.0 + 30}, 1 + i});
  SyntheticDetectorParams p;
  p.jitter_px = 8;
  p.fp_rate = 5;
  p.false_positive = {0.0, 0.4};
  for (int seed = 0; seed < 50; ++seed) {
    p.seed = seed;
    for (const auto& r : synthetic_detect(gt, tile_at(0, 0), p, "img")) {
      ASSERT_TRUE(r.is_valid());
      ASSERT_GE(r.box.x1, 0);
      ASSERT_GE(r.box.y1, 0);
      ASSERT_LE(r.box.x2, 300);
      ASSERT_LE(r.box.y2, 300);
    }
  }
}

TEST(SyntheticDetector, ScalesTruthIntoTileFrame) {
  GroundTruthSet truth{{"img", {{{100, 100, 140, 120}, kBus}}}};
  SyntheticDetector det({"sr", {300}, 0, false}, {}, &truth);
  TileRequest req{"img", "p", ScaleFactor(0.5), tile_at(0, 0), nullptr};
  auto out = det.detect(req);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BBox{50, 50, 70, 60}));
  req.image_id = "missing";
  EXPECT_TRUE(det.detect(req).empty());
}

TEST(SyntheticDetector, RejectsBadParams) {
  SyntheticDetectorParams p;
  p.drop_rate = 1.5;
  EXPECT_THROW(SyntheticDetector({"x"}, p, nullptr), std::invalid_argument);
}

class ThrowingBackend : public DetectorBackend {
 public:
  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest&) override { throw std::runtime_error("boom"); }

 private:
  DetectorContract contract_{"throwing"};
};

class SloppyBackend : public DetectorBackend {
 public:
  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest&) override {
    return {{{-10, -10, 20, 20}, 1, 0.5},   // clipped
            {{400, 400, 500, 500}, 1, 0.5},  // outside: dropped
            {{0, 0, 10, 10}, 99, 0.5},       // bad category: dropped
            {{0, 0, 10, 10}, 1, 1.5}};       // bad confidence: dropped
  }

 private:
  DetectorContract contract_{"sloppy"};
};

TEST(Detect, BackendFailureDegradesToEmpty) {
  ThrowingBackend b;
  Diagnostics diag;
  auto out = detect(b, {"img", "p", ScaleFactor(1), tile_at(0, 0), nullptr}, &diag);
  EXPECT_TRUE(out.empty());
  ASSERT_EQ(diag.count(), 1u);
  EXPECT_NE(diag.messages()[0].find("boom"), std::string::npos);
}

TEST(Detect, InvalidRegionsClippedOrDropped) {
  SloppyBackend b;
  Diagnostics diag;
  auto out = detect(b, {"img", "p", ScaleFactor(1), tile_at(0, 0), nullptr}, &diag);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].box, (BBox{0, 0, 20, 20}));
  EXPECT_EQ(diag.count(), 1u);
}

TEST(FilterBySizeGroup, KeepsAllowedInOrder) {
  std::vector<Region> rs{{{0, 0, 1, 1}, kBus, 0.5}, {{0, 0, 1, 1}, kBarge, 0.6}};
  auto out = filter_by_size_group(rs, {SizeGroup::Small, SizeGroup::Medium});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].category, kBus);
  EXPECT_EQ(filter_by_size_group(rs, kAllSizeGroups), rs);
  EXPECT_TRUE(filter_by_size_group({}, kAllSizeGroups).empty());
}

TEST(FilterBySizeGroup, UnknownCategoryNamed) {
  std::vector<Region> rs{{{0, 0, 1, 1}, 77, 0.5}};
  try {
    filter_by_size_group(rs, kAllSizeGroups);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("77"), std::string::npos);
  }
}

}  // namespace
}  // namespace tilefuse
