#include "tilefuse/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <tuple>
#include <stdexcept>

#include "tilefuse/categories.hpp"

namespace tilefuse {

CooccurrenceMatrix cooccurrence_matrix(const GroundTruthSet& truth) {
  CooccurrenceMatrix m(kNumCategories, std::vector<int>(kNumCategories, 0));
  for (const auto& [id, objects] : truth) {
    std::set<int> present;
    for (const auto& o : objects) {
      (void)category_info(o.category);
      present.insert(o.category);
    }
    for (int a : present) {
      for (int b : present) ++m[a - 1][b - 1];
    }
  }
  return m;
}

std::vector<GraphEdge> spatial_graph(std::span<const BBox> boxes, int k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const std::size_t n = boxes.size();
  if (n < 2) return {};

  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<GraphEdge> edges;
  std::vector<std::size_t> others;
  for (std::size_t i = 0; i < n; ++i) {
    auto dist = [&](std::size_t j) {
      return std::hypot(boxes[i].center_x() - boxes[j].center_x(),
                        boxes[i].center_y() - boxes[j].center_y());
    };
    others.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) others.push_back(j);
    }
    std::size_t take = std::min<std::size_t>(std::size_t(k), others.size());
    std::partial_sort(others.begin(), others.begin() + std::ptrdiff_t(take), others.end(),
                      [&](std::size_t a, std::size_t b) {
                        double da = dist(a), db = dist(b);
                        return da != db ? da < db : a < b;
                      });
    for (std::size_t t = 0; t < take; ++t) {
      std::size_t j = others[t];
      auto key = std::minmax(i, j);
      if (seen.insert(key).second) edges.push_back({key.first, key.second, dist(j)});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const GraphEdge& x, const GraphEdge& y) {
    return std::tie(x.a, x.b) < std::tie(y.a, y.b);
  });
  return edges;
}

std::vector<HistogramBin> size_histogram(const GroundTruthSet& truth) {
  constexpr int kBins = 10;  // 4, 8, ..., 2048, 4096
  std::vector<HistogramBin> bins(kBins);
  for (int i = 0; i < kBins; ++i) {
    bins[i].lo = std::ldexp(4.0, i);
    bins[i].hi = std::ldexp(4.0, i + 1);
  }
  for (const auto& [id, objects] : truth) {
    for (const auto& o : objects) {
      double extent = std::max(o.box.width(), o.box.height());
      int b = extent <= 4.0 ? 0 : static_cast<int>(std::floor(std::log2(extent / 4.0)));
      ++bins[std::clamp(b, 0, kBins - 1)].count;
    }
  }
  return bins;
}

}  // namespace tilefuse
