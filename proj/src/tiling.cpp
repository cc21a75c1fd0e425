#include "tilefuse/tiling.hpp"

#include <stdexcept>
#include <string>

namespace tilefuse {

std::vector<int> tile_origins(int extent, int tile, int overlap) {
  const int stride = tile - overlap;
  if (extent <= tile) return {0};
  std::vector<int> origins;
  for (int o = 0; o + tile < extent; o += stride) origins.push_back(o);
  // The final tile sits flush with the far edge. The loop guarantees it is
  // strictly past the previous origin, so no duplicate can appear.
  origins.push_back(extent - tile);
  return origins;
}

TilePlan plan_tiles(int image_width, int image_height, int tile, int overlap) {
  if (image_width <= 0 || image_height <= 0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (tile <= 0) throw std::invalid_argument("tile size must be positive");
  if (overlap < 0 || overlap >= tile) {
    throw std::invalid_argument("overlap " + std::to_string(overlap) +
                                " must be in [0, tile size " +
                                std::to_string(tile) + ")");
  }

  TilePlan plan;
  plan.image_width = image_width;
  plan.image_height = image_height;
  plan.tile_size = tile;
  plan.overlap = overlap;

  auto xs = tile_origins(image_width, tile, overlap);
  auto ys = tile_origins(image_height, tile, overlap);
  plan.rows = static_cast<int>(ys.size());
  plan.cols = static_cast<int>(xs.size());
  const bool padded = image_width < tile || image_height < tile;

  plan.tiles.reserve(xs.size() * ys.size());
  for (int r = 0; r < plan.rows; ++r) {
    for (int c = 0; c < plan.cols; ++c) {
      plan.tiles.push_back({xs[c], ys[r], tile, tile, r, c, padded});
    }
  }
  return plan;
}

Region tile_to_scaled(const Region& r, const TileSpec& t) {
  Region out = r;
  out.box = translate(r.box, t.origin_x, t.origin_y);
  return out;
}

}  // namespace tilefuse
