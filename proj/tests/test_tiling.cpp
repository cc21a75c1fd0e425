#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "tilefuse/tiling.hpp"

namespace tilefuse {
namespace {

std::vector<int> column_origins(const TilePlan& p) {
  std::vector<int> xs;
  for (const auto& t : p.tiles) {
    if (t.row == 0) xs.push_back(t.origin_x);
  }
  return xs;
}

TEST(Tiling, ExactDivision) {
  auto plan = plan_tiles(900, 900, 300, 0);
  EXPECT_EQ(plan.rows, 3);
  EXPECT_EQ(plan.cols, 3);
  EXPECT_EQ(column_origins(plan), (std::vector<int>{0, 300, 600}));
}

TEST(Tiling, LastTileClampedToEdge) {
  auto expected = oracle::stride_then_clamp(1000, 300, 0);
  ASSERT_EQ(expected, (std::vector<int>{0, 300, 600, 700}));
  auto plan = plan_tiles(1000, 1000, 300, 0);
  EXPECT_EQ(column_origins(plan), expected);
  EXPECT_EQ(plan.tiles.size(), 16u);
}

TEST(Tiling, OverlapStride) {
  auto expected = oracle::stride_then_clamp(1000, 300, 150);
  ASSERT_EQ(expected, (std::vector<int>{0, 150, 300, 450, 600, 700}));
  auto plan = plan_tiles(1000, 1000, 300, 150);
  EXPECT_EQ(column_origins(plan), expected);
  EXPECT_EQ(plan.tiles.size(), 36u);
}

TEST(Tiling, RejectsBadOverlap) {
  EXPECT_THROW(plan_tiles(1000, 1000, 300, 300), std::invalid_argument);
  EXPECT_THROW(plan_tiles(1000, 1000, 300, -1), std::invalid_argument);
  EXPECT_THROW(plan_tiles(0, 1000, 300, 0), std::invalid_argument);
}

TEST(Tiling, SmallImageGetsOnePaddedTile) {
  auto plan = plan_tiles(120, 800, 300, 0);
  EXPECT_EQ(plan.cols, 1);
  EXPECT_EQ(plan.rows, 3);
  for (const auto& t : plan.tiles) {
    EXPECT_EQ(t.origin_x, 0);
    EXPECT_EQ(t.width, 300);
    EXPECT_TRUE(t.needs_padding);
  }
  EXPECT_FALSE(plan_tiles(300, 300, 300, 0).tiles[0].needs_padding);
}

TEST(Tiling, TileToScaled) {
  Region r{{10, 10, 20, 20}, 5, 0.8};
  TileSpec t{300, 600, 300, 300, 2, 1, false};
  auto s = tile_to_scaled(r, t);
  EXPECT_EQ(s.box, (BBox{310, 610, 320, 620}));
  EXPECT_EQ(s.category, 5);
  EXPECT_EQ(s.confidence, 0.8);
  EXPECT_EQ(tile_to_scaled(r, TileSpec{0, 0, 300, 300, 0, 0, false}), r);
  EXPECT_EQ(tile_to_scaled({{0, 0, 300, 300}, 1, 1}, TileSpec{700, 700, 300, 300, 3, 3, false}).box,
            (BBox{700, 700, 1000, 1000}));
}

TEST(TilingProperty, CoverageBoundsAndOrder) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> dim(1, 5000);
  const int tiles[] = {300, 400, 500};
  for (int trial = 0; trial < 200; ++trial) {
    int w = dim(rng), h = dim(rng);
    int tile = tiles[trial % 3];
    int overlap = std::uniform_int_distribution<int>(0, tile - 1)(rng);
    auto plan = plan_tiles(w, h, tile, overlap);
    ASSERT_EQ(plan.tiles.size(), std::size_t(plan.rows * plan.cols));

    // Per-axis origins match the oracle; together with row-major order this
    // fixes the whole plan.
    auto xs = oracle::stride_then_clamp(w, tile, overlap);
    auto ys = oracle::stride_then_clamp(h, tile, overlap);
    ASSERT_EQ(column_origins(plan), xs);
    for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
      const auto& t = plan.tiles[i];
      ASSERT_EQ(t.row, int(i) / plan.cols);
      ASSERT_EQ(t.col, int(i) % plan.cols);
      ASSERT_EQ(t.origin_y, ys[t.row]);
      if (w >= tile) ASSERT_LE(t.origin_x + t.width, w);
      if (h >= tile) ASSERT_LE(t.origin_y + t.height, h);
      ASSERT_GE(t.origin_x, 0);
      ASSERT_GE(t.origin_y, 0);
    }
    // Coverage along each axis: consecutive origins leave no gap and the ends
    // reach the borders.
    for (auto* axis : {&xs, &ys}) {
      int extent = axis == &xs ? w : h;
      ASSERT_EQ(axis->front(), 0);
      for (std::size_t k = 1; k < axis->size(); ++k) ASSERT_LE((*axis)[k], (*axis)[k - 1] + tile);
      ASSERT_GE(axis->back() + tile, extent);
    }
    ASSERT_EQ(plan_tiles(w, h, tile, overlap).tiles, plan.tiles);
  }
}

TEST(TilingProperty, PartitionWhenExactMultiple) {
  auto plan = plan_tiles(1500, 900, 300, 0);
  for (std::size_t i = 0; i < plan.tiles.size(); ++i) {
    for (std::size_t j = i + 1; j < plan.tiles.size(); ++j) {
      ASSERT_FALSE(intersection(plan.tiles[i].bounds(), plan.tiles[j].bounds()));
    }
  }
}

TEST(TilingProperty, ComposedTransformMatchesAffine) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 250), s(0.3, 2.0);
  auto plan = plan_tiles(2000, 1500, 300, 100);
  for (int i = 0; i < 500; ++i) {
    const auto& t = plan.tiles[std::size_t(i) % plan.tiles.size()];
    double x = u(rng), y = u(rng);
    Region r{{x, y, x + 20, y + 30}, 3, 0.5};
    ScaleFactor f(s(rng));
    BBox chained = to_original(tile_to_scaled(r, t).box, f);
    double k = 1.0 / f.value();
    BBox direct{(r.box.x1 + t.origin_x) * k, (r.box.y1 + t.origin_y) * k,
                (r.box.x2 + t.origin_x) * k, (r.box.y2 + t.origin_y) * k};
    ASSERT_NEAR(chained.x1, direct.x1, 1e-9);
    ASSERT_NEAR(chained.y1, direct.y1, 1e-9);
    ASSERT_NEAR(chained.x2, direct.x2, 1e-9);
    ASSERT_NEAR(chained.y2, direct.y2, 1e-9);
  }
}

}  // namespace
}  // namespace tilefuse
