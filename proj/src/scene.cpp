#include "tilefuse/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tilefuse/categories.hpp"
#include "tilefuse/rng.hpp"

namespace tilefuse {

std::vector<GroundTruthObject> generate_scene(const SceneSpec& spec, const std::string& id) {
  CounterRng rng(combine_keys({spec.seed, fnv1a(id)}));
  std::vector<GroundTruthObject> objects;
  const double usable_w = spec.width - 2.0 * spec.margin;
  const double usable_h = spec.height - 2.0 * spec.margin;
  for (int n = 0; n < spec.objects; ++n) {
    int category = rng.uniform_int(1, kNumCategories);
    double lo = 10, hi = 40;
    switch (size_group_of(category)) {
      case SizeGroup::Small: lo = 10; hi = 40; break;
      case SizeGroup::Medium: lo = 30; hi = 120; break;
      case SizeGroup::Large: lo = 120; hi = 360; break;
    }
    for (int attempt = 0; attempt < 50; ++attempt) {
      double w = std::floor(std::min(rng.uniform(lo, hi), usable_w - 1));
      double h = std::floor(std::min(rng.uniform(lo, hi), usable_h - 1));
      if (w < 2 || h < 2) break;
      double x = std::floor(spec.margin + rng.uniform(0.0, usable_w - w));
      double y = std::floor(spec.margin + rng.uniform(0.0, usable_h - h));
      BBox box{x, y, x + w, y + h};
      bool clear = std::none_of(objects.begin(), objects.end(), [&](const auto& o) {
        return intersection(o.box, box).has_value();
      });
      if (clear) {
        objects.push_back({box, category});
        break;
      }
    }
  }
  return objects;
}

GroundTruthSet generate_scenes(const SceneSpec& spec, int count) {
  GroundTruthSet set;
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "scene-%03d", i);
    set[id] = generate_scene(spec, id);
  }
  return set;
}

Image render_scene(int width, int height, const std::vector<GroundTruthObject>& objects) {
  Image img(width, height);
  std::fill(img.rgb.begin(), img.rgb.end(), std::uint8_t{96});
  for (const auto& o : objects) {
    auto shade = static_cast<std::uint8_t>(40 + (o.category * 37) % 200);
    int x0 = std::clamp(int(o.box.x1), 0, width), x1 = std::clamp(int(o.box.x2), 0, width);
    int y0 = std::clamp(int(o.box.y1), 0, height), y1 = std::clamp(int(o.box.y2), 0, height);
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        auto* p = img.pixel(x, y);
        p[0] = shade;
        p[1] = static_cast<std::uint8_t>(255 - shade);
        p[2] = static_cast<std::uint8_t>(o.category * 4);
      }
    }
  }
  return img;
}

}  // namespace tilefuse
