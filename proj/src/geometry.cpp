#include "tilefuse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>

#include "tilefuse/categories.hpp"

namespace tilefuse {

bool BBox::is_valid() const {
  return std::isfinite(x1) && std::isfinite(y1) && std::isfinite(x2) &&
         std::isfinite(y2) && x1 < x2 && y1 < y2;
}

BBox make_box(double x1, double y1, double x2, double y2) {
  BBox b{x1, y1, x2, y2};
  if (!b.is_valid()) {
    throw std::invalid_argument("invalid box (" + std::to_string(x1) + "," +
                                std::to_string(y1) + "," + std::to_string(x2) +
                                "," + std::to_string(y2) + ")");
  }
  return b;
}

bool Region::is_valid() const {
  return box.is_valid() && category >= 1 && category <= kNumCategories &&
         confidence >= 0.0 && confidence <= 1.0;
}

ScaleFactor::ScaleFactor(double value) : value_(value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument("scale factor must be positive, got " +
                                std::to_string(value));
  }
}

double area(const BBox& b) { return b.width() * b.height(); }

std::optional<BBox> intersection(const BBox& a, const BBox& b) {
  BBox r{std::max(a.x1, b.x1), std::max(a.y1, b.y1), std::min(a.x2, b.x2),
         std::min(a.y2, b.y2)};
  if (r.x1 < r.x2 && r.y1 < r.y2) return r;
  return std::nullopt;
}

double iou(const BBox& a, const BBox& b) {
  auto inter = intersection(a, b);
  if (!inter) return 0.0;
  double i = area(*inter);
  double u = area(a) + area(b) - i;
  return std::clamp(i / u, 0.0, 1.0);
}

double intersection_score(const BBox& ref, const BBox& other) {
  auto inter = intersection(ref, other);
  if (!inter) return 0.0;
  return std::clamp(area(*inter) / area(ref), 0.0, 1.0);
}

BBox to_original(const BBox& b, ScaleFactor s) {
  double inv = 1.0 / s.value();
  return {b.x1 * inv, b.y1 * inv, b.x2 * inv, b.y2 * inv};
}

BBox to_scaled(const BBox& b, ScaleFactor s) {
  double k = s.value();
  return {b.x1 * k, b.y1 * k, b.x2 * k, b.y2 * k};
}

BBox translate(const BBox& b, double dx, double dy) {
  return {b.x1 + dx, b.y1 + dy, b.x2 + dx, b.y2 + dy};
}

std::optional<BBox> clip(const BBox& b, double width, double height) {
  return intersection(b, BBox{0.0, 0.0, width, height});
}

bool canonical_less(const Region& a, const Region& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return std::tie(a.category, a.box.x1, a.box.y1, a.box.x2, a.box.y2) <
         std::tie(b.category, b.box.x1, b.box.y1, b.box.x2, b.box.y2);
}

void sort_canonical(std::vector<Region>& regions) {
  std::sort(regions.begin(), regions.end(), canonical_less);
}

}  // namespace tilefuse
