#include "tilefuse/detector.hpp"

#include <algorithm>
#include <exception>
#include <string>

namespace tilefuse {

int DetectorContract::min_tile_size() const {
  return *std::min_element(tile_sizes.begin(), tile_sizes.end());
}

std::vector<Region> detect(DetectorBackend& backend, const TileRequest& request,
                           Diagnostics* diagnostics) {
  auto where = [&] {
    return backend.contract().name + " on " + std::string(request.image_id) +
           " tile (" + std::to_string(request.tile.row) + "," +
           std::to_string(request.tile.col) + ")";
  };

  std::vector<Region> raw;
  try {
    raw = backend.detect(request);
  } catch (const std::exception& e) {
    if (diagnostics) diagnostics->warn(where() + ": " + e.what());
    return {};
  }

  std::vector<Region> out;
  out.reserve(raw.size());
  std::size_t dropped = 0;
  for (const auto& r : raw) {
    bool fields_ok = r.category >= 1 && r.category <= kNumCategories &&
                     r.confidence >= 0.0 && r.confidence <= 1.0;
    auto box = fields_ok ? clip(r.box, request.tile.width, request.tile.height)
                         : std::nullopt;
    if (!box || !box->is_valid()) {
      ++dropped;
      continue;
    }
    out.push_back({*box, r.category, r.confidence});
  }
  if (dropped && diagnostics) {
    diagnostics->warn(where() + ": dropped " + std::to_string(dropped) +
                      " invalid region(s)");
  }
  return out;
}

std::vector<Region> filter_by_size_group(std::span<const Region> regions,
                                         const SizeGroupSet& allowed) {
  std::vector<Region> out;
  out.reserve(regions.size());
  for (const auto& r : regions) {
    if (allowed.contains(size_group_of(r.category))) out.push_back(r);
  }
  return out;
}

}  // namespace tilefuse
