#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tilefuse/categories.hpp"
#include "tilefuse/diagnostics.hpp"
#include "tilefuse/geometry.hpp"
#include "tilefuse/image.hpp"
#include "tilefuse/tiling.hpp"

namespace tilefuse {

struct DetectorContract {
  std::string name;
  // Square input edge per pass. A single-resolution backend has one entry;
  // a multi-resolution backend runs one tiling pass per entry.
  std::vector<int> tile_sizes{300};
  // Maximum concurrent detect() calls; 0 means unbounded.
  int capacity = 0;
  bool needs_pixels = false;

  int input_size() const { return tile_sizes.front(); }
  int min_tile_size() const;
};

struct TileRequest {
  std::string_view image_id;
  std::string_view pipeline;
  ScaleFactor scale{1.0};
  TileSpec tile;
  // Rendered tile (tile.width x tile.height) when the backend needs pixels.
  const Image* pixels = nullptr;
};

class DetectorBackend {
 public:
  virtual ~DetectorBackend() = default;
  virtual const DetectorContract& contract() const = 0;
  // Tile-local regions. May throw on backend failure.
  virtual std::vector<Region> detect(const TileRequest& request) = 0;
};

// Runs one backend call under the per-tile failure policy: a throwing
// backend yields an empty list plus a diagnostic, and regions that fall
// outside the tile or carry invalid fields are clipped or dropped.
std::vector<Region> detect(DetectorBackend& backend, const TileRequest& request,
                           Diagnostics* diagnostics);

// Keeps regions whose category belongs to one of the allowed size groups, in
// input order. Throws DataError on an unknown category id.
std::vector<Region> filter_by_size_group(std::span<const Region> regions,
                                         const SizeGroupSet& allowed);

}  // namespace tilefuse
