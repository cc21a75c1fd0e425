#pragma once

#include <vector>

#include "tilefuse/geometry.hpp"

namespace tilefuse {

struct TileSpec {
  int origin_x = 0;
  int origin_y = 0;
  int width = 0;   // detector input size, also when the image is smaller
  int height = 0;
  int row = 0;
  int col = 0;
  // Set when the image is smaller than the tile along some axis; the
  // uncovered bottom/right band is zero-filled when pixels are rendered.
  bool needs_padding = false;

  BBox bounds() const {
    return {double(origin_x), double(origin_y), double(origin_x + width),
            double(origin_y + height)};
  }

  friend bool operator==(const TileSpec&, const TileSpec&) = default;
};

struct TilePlan {
  int image_width = 0;
  int image_height = 0;
  int tile_size = 0;
  int overlap = 0;
  int rows = 0;
  int cols = 0;
  std::vector<TileSpec> tiles;  // row-major
};

// Origins along one axis: 0, stride, 2*stride, ... with the last tile moved
// back flush with the far edge. A dimension shorter than the tile yields the
// single origin 0.
std::vector<int> tile_origins(int extent, int tile, int overlap);

// Throws std::invalid_argument unless image dims and tile are positive and
// 0 <= overlap < tile.
TilePlan plan_tiles(int image_width, int image_height, int tile, int overlap);

// Tile-local region into the scaled-image frame.
Region tile_to_scaled(const Region& r, const TileSpec& t);

}  // namespace tilefuse
