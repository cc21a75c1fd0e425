#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tilefuse/dataset.hpp"
#include "tilefuse/image.hpp"

namespace tilefuse {

struct SceneSpec {
  int width = 1200;
  int height = 1200;
  int objects = 40;
  std::uint64_t seed = 0;
  // Fixed margin kept free around the border.
  int margin = 0;
};

// Random non-overlapping ground truth with categories drawn uniformly and
// extents drawn per size group (small 10-40 px, medium 30-120 px, large
// 120-360 px, capped to the image). Placement gives up on an object after a
// bounded number of attempts, so dense scenes may hold fewer objects.
std::vector<GroundTruthObject> generate_scene(const SceneSpec& spec, const std::string& id);

// Scene set "scene-000" .. with per-scene seeds derived from `spec.seed`.
GroundTruthSet generate_scenes(const SceneSpec& spec, int count);

// Flat background with each object painted as a filled rectangle.
Image render_scene(int width, int height, const std::vector<GroundTruthObject>& objects);

}  // namespace tilefuse
