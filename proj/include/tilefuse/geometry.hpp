#pragma once

#include <optional>
#include <span>
#include <vector>

namespace tilefuse {

// Axis-aligned box in continuous pixel coordinates. Half-open convention:
// area is (x2 - x1) * (y2 - y1), no "+1" pixel correction.
struct BBox {
  double x1 = 0.0;
  double y1 = 0.0;
  double x2 = 0.0;
  double y2 = 0.0;

  double width() const { return x2 - x1; }
  double height() const { return y2 - y1; }
  double center_x() const { return 0.5 * (x1 + x2); }
  double center_y() const { return 0.5 * (y1 + y2); }

  // Finite coordinates and strictly positive extent on both axes.
  bool is_valid() const;

  friend bool operator==(const BBox&, const BBox&) = default;
};

// Throws std::invalid_argument if the coordinates do not form a valid box.
BBox make_box(double x1, double y1, double x2, double y2);

// A detection hypothesis: box, category id in [1, kNumCategories] and a
// confidence in [0, 1].
struct Region {
  BBox box;
  int category = 0;
  double confidence = 0.0;

  bool is_valid() const;

  friend bool operator==(const Region&, const Region&) = default;
};

// Multiplier applied to image dimensions before tiling; < 1 downscales.
class ScaleFactor {
 public:
  explicit ScaleFactor(double value);
  double value() const { return value_; }

 private:
  double value_;
};

double area(const BBox& b);

// Positive-area overlap of two boxes; edge or corner contact yields nullopt.
std::optional<BBox> intersection(const BBox& a, const BBox& b);

double iou(const BBox& a, const BBox& b);

// area(ref ∩ other) / area(ref). Asymmetric: normalized by the first box.
double intersection_score(const BBox& ref, const BBox& other);

// Scaled-frame box back to the original frame: every coordinate times 1/s.
BBox to_original(const BBox& b, ScaleFactor s);
// Original-frame box into the scaled frame: every coordinate times s.
BBox to_scaled(const BBox& b, ScaleFactor s);

BBox translate(const BBox& b, double dx, double dy);

// Intersection with [0, width] x [0, height].
std::optional<BBox> clip(const BBox& b, double width, double height);

// Canonical region order: confidence descending, then category, x1, y1, x2,
// y2 ascending. Every ranking step in the toolkit uses this order so results
// do not depend on arrival order.
bool canonical_less(const Region& a, const Region& b);

void sort_canonical(std::vector<Region>& regions);

}  // namespace tilefuse
