#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <mutex>

#include "tilefuse/backends.hpp"
#include "tilefuse/categories.hpp"
#include "tilefuse/pipeline.hpp"
#include "tilefuse/scene.hpp"
#include "tilefuse/synthetic_detector.hpp"

namespace tilefuse {
namespace {

DetectorContract make_contract(std::vector<int> sizes = {300}) {
  DetectorContract c;
  c.name = "test";
  c.tile_sizes = std::move(sizes);
  return c;
}

PipelineConfig pipeline(double scale, int overlap, double threshold = 0.0) {
  PipelineConfig p;
  p.name = "p";
  p.scale = ScaleFactor(scale);
  p.overlap_px = overlap;
  p.confidence_threshold = threshold;
  p.backend = "b";
  return p;
}

std::vector<Region> as_regions(const std::vector<GroundTruthObject>& objs) {
  std::vector<Region> out;
  for (const auto& o : objs) out.push_back({o.box, o.category, 1.0});
  sort_canonical(out);
  return out;
}

// Records every request and checks the rendered pixels match the tile.
class ProbeBackend : public DetectorBackend {
 public:
  explicit ProbeBackend(bool needs_pixels) : contract_(make_contract()) {
    contract_.needs_pixels = needs_pixels;
  }
  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest& r) override {
    std::lock_guard lock(mutex_);
    ++calls;
    if (contract_.needs_pixels) {
      bool ok = r.pixels && r.pixels->width == r.tile.width && r.pixels->height == r.tile.height;
      pixel_mismatch += !ok;
    } else {
      pixel_mismatch += r.pixels != nullptr;
    }
    return {};
  }
  std::mutex mutex_;
  int calls = 0;
  int pixel_mismatch = 0;

 private:
  DetectorContract contract_;
};

class ThrowingBackend : public DetectorBackend {
 public:
  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest&) override { throw std::runtime_error("boom"); }
  DetectorContract contract_ = make_contract();
};

TEST(RunPipeline, PerfectDetectorRecoversTruthInsideTiles) {
  // Each object sits inside one 300 px tile of a 900x600 image.
  GroundTruthSet truth{{"img", {{{10, 10, 60, 50}, 7},
                                {{320, 20, 380, 90}, 49},
                                {{650, 400, 890, 590}, 28}}}};
  SyntheticDetector det(make_contract(), {}, &truth);
  RunContext ctx;
  ImageSource src{"img", {}, 900, 600, nullptr};
  auto r = run_pipeline(src, pipeline(1.0, 0), det, ctx);
  EXPECT_EQ(r.tiles_planned, 6u);
  EXPECT_EQ(r.tiles_run, 6u);
  EXPECT_FALSE(r.partial());
  EXPECT_EQ(r.regions, as_regions(truth["img"]));
}

TEST(RunPipeline, ScaledFrameMapsBack) {
  GroundTruthSet truth{{"img", {{{100, 100, 200, 220}, 7}, {{900, 700, 1100, 900}, 49}}}};
  SyntheticDetector det(make_contract(), {}, &truth);
  RunContext ctx;
  ImageSource src{"img", {}, 1200, 1000, nullptr};
  auto r = run_pipeline(src, pipeline(0.5, 0), det, ctx);
  EXPECT_EQ(r.tiles_planned, 4u);
  ASSERT_EQ(r.regions.size(), 2u);
  EXPECT_EQ(r.regions, as_regions(truth["img"]));
}

TEST(RunPipeline, UpscaledPipelineClipsToImage) {
  GroundTruthSet truth{{"img", {{{0, 0, 40, 40}, 7}, {{80, 80, 100, 100}, 7}}}};
  SyntheticDetector det(make_contract(), {}, &truth);
  RunContext ctx;
  ImageSource src{"img", {}, 100, 100, nullptr};
  auto r = run_pipeline(src, pipeline(1.3, 0), det, ctx);
  EXPECT_EQ(r.tiles_planned, 1u);
  for (const auto& reg : r.regions) {
    EXPECT_GE(reg.box.x1, 0.0);
    EXPECT_LE(reg.box.x2, 100.0);
    EXPECT_LE(reg.box.y2, 100.0);
  }
  ASSERT_EQ(r.regions.size(), 2u);
  EXPECT_NEAR(r.regions[1].box.x2, 100.0, 1e-9);
}

TEST(RunPipeline, ThresholdIsMonotone) {
  SceneSpec spec;
  spec.width = 900;
  spec.height = 900;
  spec.seed = 3;
  GroundTruthSet truth{{"s", generate_scene(spec, "s")}};
  SyntheticDetectorParams noisy;
  noisy.jitter_px = 3;
  noisy.drop_rate = 0.1;
  noisy.fp_rate = 2;
  noisy.true_positive = {0.3, 1.0};
  SyntheticDetector det(make_contract(), noisy, &truth);
  ImageSource src{"s", {}, 900, 900, nullptr};
  RunContext ctx;
  std::vector<Region> previous;
  bool first = true;
  for (double lambda : {0.0, 0.06, 0.15, 0.3, 0.5, 0.9, 1.0}) {
    auto r = run_pipeline(src, pipeline(1.0, 50, lambda), det, ctx);
    for (const auto& reg : r.regions) EXPECT_GE(reg.confidence, lambda);
    if (!first) {
      for (const auto& reg : r.regions) {
        EXPECT_NE(std::find(previous.begin(), previous.end(), reg), previous.end());
      }
      EXPECT_LE(r.regions.size(), previous.size());
    }
    previous = r.regions;
    first = false;
  }
}

TEST(RunPipeline, SizeGroupFilter) {
  GroundTruthSet truth{{"img", {}}};
  for (int id = 1; id <= kNumCategories; ++id) {
    double x = (id % 10) * 30.0, y = (id / 10) * 40.0;
    truth["img"].push_back({{x, y, x + 20, y + 20}, id});
  }
  SyntheticDetector det(make_contract(), {}, &truth);
  RunContext ctx;
  ImageSource src{"img", {}, 300, 300, nullptr};
  auto p = pipeline(1.0, 0);
  p.size_groups = {SizeGroup::Large};
  auto r = run_pipeline(src, p, det, ctx);
  EXPECT_FALSE(r.regions.empty());
  for (const auto& reg : r.regions) EXPECT_EQ(size_group_of(reg.category), SizeGroup::Large);
}

TEST(RunPipeline, MultiResolutionRunsOnePassPerTileSize) {
  GroundTruthSet truth{{"img", {{{10, 10, 50, 50}, 7}}}};
  SyntheticDetector det(make_contract({300, 400, 500}), {}, &truth);
  RunContext ctx;
  ImageSource src{"img", {}, 1000, 1000, nullptr};
  auto r = run_pipeline(src, pipeline(1.0, 100), det, ctx);
  EXPECT_EQ(r.tiles_planned, 25u + 9u + 9u);
  EXPECT_EQ(r.regions.size(), 3u);
}

TEST(RunPipeline, IndependentOfWorkerCount) {
  SceneSpec spec;
  spec.width = 1500;
  spec.height = 1100;
  spec.objects = 80;
  spec.seed = 11;
  GroundTruthSet truth{{"s", generate_scene(spec, "s")}};
  SyntheticDetectorParams noisy;
  noisy.jitter_px = 4;
  noisy.drop_rate = 0.2;
  noisy.fp_rate = 1.5;
  noisy.true_positive = {0.2, 1.0};
  SyntheticDetector det(make_contract({300, 400}), noisy, &truth);
  ImageSource src{"s", {}, 1500, 1100, nullptr};
  std::vector<Region> base;
  for (int workers : {1, 2, 4, 16}) {
    RunContext ctx;
    ctx.workers = workers;
    auto r = run_pipeline(src, pipeline(1.3, 60), det, ctx);
    if (workers == 1) base = r.regions;
    else EXPECT_EQ(r.regions, base) << workers;
  }
  EXPECT_FALSE(base.empty());
}

TEST(RunPipeline, PixelsOnlyForBackendsThatNeedThem) {
  Image img(640, 480);
  ImageSource src{"img", {}, 640, 480, &img};
  RunContext ctx;
  ctx.workers = 4;
  MemoryTracker mem;
  ctx.memory = &mem;
  ProbeBackend with(true), without(false);
  run_pipeline(src, pipeline(0.7, 0), with, ctx);
  run_pipeline(src, pipeline(0.7, 0), without, ctx);
  EXPECT_EQ(with.calls, 4);
  EXPECT_EQ(with.pixel_mismatch, 0);
  EXPECT_EQ(without.pixel_mismatch, 0);
  EXPECT_GT(mem.peak(), 0u);
  EXPECT_EQ(mem.current(), 0u);
}

TEST(RunPipeline, StreamsTilesInsteadOfScalingTheWholeImage) {
  // A 1.3x copy of this image would be about 40 MB; tiles are 270 kB each.
  Image img(3000, 2000);
  ImageSource src{"img", {}, 3000, 2000, &img};
  MemoryTracker mem;
  RunContext ctx;
  ctx.workers = 4;
  ctx.memory = &mem;
  ProbeBackend probe(true);
  run_pipeline(src, pipeline(1.3, 0), probe, ctx);
  EXPECT_EQ(probe.pixel_mismatch, 0);
  EXPECT_LT(mem.peak(), 4u * 300 * 300 * 3 + (1u << 20));
}

TEST(RunPipeline, BackendFailureYieldsEmptyTiles) {
  ThrowingBackend bad;
  Diagnostics diag;
  RunContext ctx;
  ctx.diagnostics = &diag;
  ImageSource src{"img", {}, 600, 300, nullptr};
  auto r = run_pipeline(src, pipeline(1.0, 0), bad, ctx);
  EXPECT_TRUE(r.regions.empty());
  EXPECT_EQ(r.tiles_run, 2u);
  EXPECT_EQ(diag.count(), 2u);
}

TEST(RunPipeline, BudgetStopsRemainingTiles) {
  GroundTruthSet truth{{"img", {}}};
  SyntheticDetectorParams slow;
  slow.delay_ms = 20;
  SyntheticDetector det(make_contract(), slow, &truth);
  BudgetMonitor budget({0.1, 100.0, 8ULL << 30}, nullptr);
  RunContext ctx;
  ctx.budget = &budget;
  ImageSource src{"img", {}, 3000, 3000, nullptr};
  budget.start_image();
  auto r = run_pipeline(src, pipeline(1.0, 0), det, ctx);
  EXPECT_TRUE(r.partial());
  EXPECT_EQ(r.budget.kind, BudgetKind::PerImageTime);
  EXPECT_LT(r.tiles_run, r.tiles_planned);
  EXPECT_GT(r.tiles_run, 0u);
}

TEST(RunEnsemble, PerfectBackendsReproduceTruth) {
  GroundTruthSet truth{{"img", {{{10, 10, 40, 40}, kNumCategories}, {{100, 100, 130, 140}, 7},
                                {{150, 20, 200, 60}, 49}}}};
  auto cfg = EnsembleConfig{};
  cfg.backends = builtin_backend_specs();
  for (int i = 0; i < 3; ++i) {
    auto p = pipeline(1.0, 0);
    p.name = "p" + std::to_string(i);
    p.backend = i == 0 ? kSingleResolutionBackend : kMultiResolutionBackend;
    cfg.pipelines.push_back(p);
  }
  cfg.validate();
  auto registry = make_backends(cfg.backends, &truth, 1);
  RunContext ctx;
  ImageSource src{"img", {}, 250, 250, nullptr};
  auto r = run_ensemble(src, cfg, registry, ctx);
  EXPECT_EQ(r.pipelines.size(), 3u);
  EXPECT_EQ(r.failed_pipelines, 0u);
  EXPECT_EQ(r.fused, as_regions(truth["img"]));
}

TEST(RunEnsemble, FailingPipelineIsSkipped) {
  GroundTruthSet truth{{"img", {{{10, 10, 40, 40}, 7}}}};
  auto cfg = EnsembleConfig{};
  cfg.backends = builtin_backend_specs();
  auto good = pipeline(1.0, 0);
  good.backend = kSingleResolutionBackend;
  auto bad = pipeline(1.0, 0);
  bad.name = "bad";
  bad.backend = "missing";
  cfg.pipelines = {bad, good};
  auto registry = make_backends(cfg.backends, &truth, 1);
  Diagnostics diag;
  RunContext ctx;
  ctx.diagnostics = &diag;
  auto r = run_ensemble(ImageSource{"img", {}, 100, 100, nullptr}, cfg, registry, ctx);
  EXPECT_EQ(r.failed_pipelines, 1u);
  EXPECT_EQ(r.fused.size(), 1u);
  EXPECT_EQ(diag.count(), 1u);
}

TEST(EnsembleConfig, ValidateNamesThePipeline) {
  auto cfg = EnsembleConfig{};
  cfg.backends = builtin_backend_specs();
  auto p = pipeline(1.0, 300);
  p.name = "wide";
  p.backend = kMultiResolutionBackend;
  cfg.pipelines = {p};
  try {
    cfg.validate();
    FAIL();
  } catch (const std::exception& e) {
    EXPECT_NE(std::string(e.what()).find("wide"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("overlap_px"), std::string::npos);
  }
}

}  // namespace
}  // namespace tilefuse
