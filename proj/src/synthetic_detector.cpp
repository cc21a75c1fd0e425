#include "tilefuse/synthetic_detector.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <string>
#include <thread>

#include "tilefuse/rng.hpp"

namespace tilefuse {

void SyntheticDetectorParams::validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!(jitter_px >= 0.0)) throw std::invalid_argument("jitter_px must be >= 0");
  if (!in_unit(drop_rate)) throw std::invalid_argument("drop_rate must be in [0,1]");
  if (!(fp_rate >= 0.0)) throw std::invalid_argument("fp_rate must be >= 0");
  for (const auto* r : {&true_positive, &false_positive}) {
    if (!in_unit(r->lo) || !in_unit(r->hi) || r->lo > r->hi) {
      throw std::invalid_argument("confidence range must satisfy 0 <= lo <= hi <= 1");
    }
  }
  if (!(delay_ms >= 0.0)) throw std::invalid_argument("delay_ms must be >= 0");
}

std::vector<Region> synthetic_detect(std::span<const GroundTruthObject> scaled_gt,
                                     const TileSpec& tile,
                                     const SyntheticDetectorParams& params,
                                     std::string_view stream) {
  const std::uint64_t tile_key =
      combine_keys({params.seed, fnv1a(stream), std::uint64_t(tile.width),
                    std::uint64_t(tile.row), std::uint64_t(tile.col)});
  const BBox bounds = tile.bounds();
  std::vector<Region> out;

  for (std::size_t i = 0; i < scaled_gt.size(); ++i) {
    const auto& gt = scaled_gt[i];
    if (intersection_score(gt.box, bounds) <= kVisibilityThreshold) continue;
    CounterRng rng(combine_keys({tile_key, 1, i}));
    if (rng.uniform() < params.drop_rate) continue;

    BBox local = translate(gt.box, -tile.origin_x, -tile.origin_y);
    if (params.jitter_px > 0.0) {
      const double j = params.jitter_px;
      local.x1 += rng.uniform(-j, j);
      local.y1 += rng.uniform(-j, j);
      local.x2 += rng.uniform(-j, j);
      local.y2 += rng.uniform(-j, j);
    }
    const auto& c = params.true_positive;
    double conf = c.lo == c.hi ? c.lo : rng.uniform(c.lo, c.hi);
    auto clipped = clip(local, tile.width, tile.height);
    if (!clipped) continue;
    out.push_back({*clipped, gt.category, conf});
  }

  CounterRng fp(combine_keys({tile_key, 2}));
  const int spurious = fp.poisson(params.fp_rate);
  const double max_side = std::max(8.0, std::min(tile.width, tile.height) / 4.0);
  for (int k = 0; k < spurious; ++k) {
    double w = fp.uniform(8.0, max_side);
    double h = fp.uniform(8.0, max_side);
    double x = fp.uniform(0.0, tile.width - w);
    double y = fp.uniform(0.0, tile.height - h);
    int category = fp.uniform_int(1, kNumCategories);
    const auto& c = params.false_positive;
    double conf = c.lo == c.hi ? c.lo : fp.uniform(c.lo, c.hi);
    out.push_back({BBox{x, y, x + w, y + h}, category, conf});
  }
  return out;
}

SyntheticDetector::SyntheticDetector(DetectorContract contract,
                                     SyntheticDetectorParams params,
                                     const GroundTruthSet* truth)
    : contract_(std::move(contract)), params_(params), truth_(truth) {
  params_.validate();
}

std::vector<Region> SyntheticDetector::detect(const TileRequest& request) {
  if (params_.delay_ms > 0.0) {
    std::this_thread::sleep_for(
        std::chrono::duration<double, std::milli>(params_.delay_ms));
  }
  if (!truth_) return {};
  auto it = truth_->find(std::string(request.image_id));
  if (it == truth_->end()) return {};

  std::vector<GroundTruthObject> scaled;
  scaled.reserve(it->second.size());
  for (const auto& g : it->second) {
    scaled.push_back({to_scaled(g.box, request.scale), g.category});
  }
  std::string stream = std::string(request.image_id) + "/" +
                       std::string(request.pipeline) + "/" + contract_.name;
  return synthetic_detect(scaled, request.tile, params_, stream);
}

}  // namespace tilefuse
