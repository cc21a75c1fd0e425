#include "tilefuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace tilefuse {
namespace {

// Uniform grid over box extents, one namespace per category (or a single
// shared one under CategoryAgnostic). Positive overlap implies a shared
// cell, so the grid only prunes pairs that could never join a group.
class OverlapIndex {
 public:
  OverlapIndex(std::span<const Region> sorted, CategoryScope scope)
      : sorted_(sorted), scope_(scope) {
    std::vector<double> sides;
    sides.reserve(sorted.size());
    for (const auto& r : sorted) sides.push_back(std::max(r.box.width(), r.box.height()));
    if (!sides.empty()) {
      auto mid = sides.begin() + sides.size() / 2;
      std::nth_element(sides.begin(), mid, sides.end());
      cell_ = std::max(*mid, 1e-6);
    }
    for (int i = 0; i < static_cast<int>(sorted.size()); ++i) insert(i);
  }

  // Indices sharing a cell with region i (unsorted, may include i).
  template <typename Visit>
  void for_each_candidate(int i, Visit&& visit) const {
    const auto& r = sorted_[static_cast<std::size_t>(i)];
    const auto scope = scope_key(r);
    if (auto it = oversized_.find(scope); it != oversized_.end()) {
      for (int j : it->second) visit(j);
    }
    auto [cx0, cy0, cx1, cy1] = cell_range(r.box);
    if (cell_count(cx0, cy0, cx1, cy1) > kMaxCells) {
      // A huge query box: scan everything in its scope.
      for (int j : members_.at(scope)) visit(j);
      return;
    }
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        auto it = cells_.find(cell_key(scope, cx, cy));
        if (it == cells_.end()) continue;
        for (int j : it->second) visit(j);
      }
    }
  }

 private:
  static constexpr std::int64_t kMaxCells = 4096;

  struct Range {
    std::int64_t cx0, cy0, cx1, cy1;
  };

  Range cell_range(const BBox& b) const {
    return {static_cast<std::int64_t>(std::floor(b.x1 / cell_)),
            static_cast<std::int64_t>(std::floor(b.y1 / cell_)),
            static_cast<std::int64_t>(std::floor(b.x2 / cell_)),
            static_cast<std::int64_t>(std::floor(b.y2 / cell_))};
  }

  static std::int64_t cell_count(std::int64_t cx0, std::int64_t cy0,
                                 std::int64_t cx1, std::int64_t cy1) {
    return (cx1 - cx0 + 1) * (cy1 - cy0 + 1);
  }

  std::uint64_t scope_key(const Region& r) const {
    return scope_ == CategoryScope::PerCategory ? std::uint64_t(r.category) : 0;
  }

  static std::uint64_t cell_key(std::uint64_t scope, std::int64_t cx,
                                std::int64_t cy) {
    std::uint64_t h = scope * 0x9e3779b97f4a7c15ULL;
    h ^= std::uint64_t(cx) * 0xbf58476d1ce4e5b9ULL + (h << 6) + (h >> 2);
    h ^= std::uint64_t(cy) * 0x94d049bb133111ebULL + (h << 6) + (h >> 2);
    return h;
  }

  void insert(int i) {
    const auto& r = sorted_[static_cast<std::size_t>(i)];
    const auto scope = scope_key(r);
    members_[scope].push_back(i);
    auto [cx0, cy0, cx1, cy1] = cell_range(r.box);
    if (cell_count(cx0, cy0, cx1, cy1) > kMaxCells) {
      oversized_[scope].push_back(i);
      return;
    }
    for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
      for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        cells_[cell_key(scope, cx, cy)].push_back(i);
      }
    }
  }

  // Hash collisions between distinct cells only add candidates, never lose
  // them, so a plain 64-bit key is enough.
  std::span<const Region> sorted_;
  CategoryScope scope_;
  double cell_ = 1.0;
  std::unordered_map<std::uint64_t, std::vector<int>> cells_;
  std::unordered_map<std::uint64_t, std::vector<int>> oversized_;
  std::unordered_map<std::uint64_t, std::vector<int>> members_;
};

}  // namespace

void FusionParams::validate() const {
  if (!(sigma > 0.0 && sigma < 1.0)) {
    throw std::invalid_argument("sigma must be in (0, 1), got " + std::to_string(sigma));
  }
}

std::string_view to_string(OverlapMetric m) {
  return m == OverlapMetric::IoU ? "iou" : "intersection-score";
}
std::string_view to_string(FusionMode m) {
  return m == FusionMode::Select ? "select" : "merge";
}
std::string_view to_string(CategoryScope s) {
  return s == CategoryScope::PerCategory ? "per-category" : "agnostic";
}

std::optional<OverlapMetric> parse_metric(std::string_view text) {
  if (text == "iou") return OverlapMetric::IoU;
  if (text == "is" || text == "intersection-score") return OverlapMetric::IntersectionScore;
  return std::nullopt;
}
std::optional<FusionMode> parse_mode(std::string_view text) {
  if (text == "select" || text == "nms") return FusionMode::Select;
  if (text == "merge" || text == "weighted-merge") return FusionMode::WeightedMerge;
  return std::nullopt;
}
std::optional<CategoryScope> parse_scope(std::string_view text) {
  if (text == "per-category") return CategoryScope::PerCategory;
  if (text == "agnostic" || text == "category-agnostic") return CategoryScope::CategoryAgnostic;
  return std::nullopt;
}

double overlap(const BBox& seed, const BBox& other, OverlapMetric metric) {
  return metric == OverlapMetric::IoU ? iou(seed, other)
                                      : intersection_score(seed, other);
}

std::vector<RegionGroup> group_regions(std::span<const Region> regions,
                                       const FusionParams& params) {
  params.validate();
  std::vector<Region> sorted(regions.begin(), regions.end());
  sort_canonical(sorted);
  const int n = static_cast<int>(sorted.size());

  OverlapIndex index(sorted, params.scope);
  std::vector<char> assigned(sorted.size(), 0);
  std::vector<int> stamp(sorted.size(), -1);
  std::vector<int> joined;
  std::vector<RegionGroup> groups;

  for (int i = 0; i < n; ++i) {
    if (assigned[i]) continue;
    assigned[i] = 1;
    const Region& seed = sorted[i];
    joined.clear();
    index.for_each_candidate(i, [&](int j) {
      if (assigned[j] || stamp[j] == i) return;
      stamp[j] = i;
      if (overlap(seed.box, sorted[j].box, params.metric) > params.sigma) {
        joined.push_back(j);
      }
    });
    std::sort(joined.begin(), joined.end());

    RegionGroup g{seed, {seed}};
    g.members.reserve(joined.size() + 1);
    for (int j : joined) {
      assigned[j] = 1;
      g.members.push_back(sorted[j]);
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<Region> nms_select(std::span<const RegionGroup> groups) {
  std::vector<Region> out;
  out.reserve(groups.size());
  for (const auto& g : groups) out.push_back(g.seed);
  return out;
}

std::vector<Region> weighted_merge(std::span<const RegionGroup> groups,
                                   MergeStats* stats) {
  std::vector<Region> out;
  out.reserve(groups.size());
  for (const auto& g : groups) {
    if (g.members.size() == 1) {
      out.push_back(g.members.front());
      continue;
    }
    double total = 0.0;
    for (const auto& m : g.members) total += m.confidence;
    const bool unweighted = !(total > 0.0);
    if (unweighted) {
      total = static_cast<double>(g.members.size());
      if (stats) ++stats->zero_weight_groups;
    }
    BBox acc{0.0, 0.0, 0.0, 0.0};
    for (const auto& m : g.members) {
      double w = unweighted ? 1.0 : m.confidence;
      acc.x1 += w * m.box.x1;
      acc.y1 += w * m.box.y1;
      acc.x2 += w * m.box.x2;
      acc.y2 += w * m.box.y2;
    }
    Region merged = g.seed;
    merged.box = {acc.x1 / total, acc.y1 / total, acc.x2 / total, acc.y2 / total};
    out.push_back(merged);
  }
  return out;
}

std::vector<Region> fuse(std::span<const Region> regions,
                         const FusionParams& params, Diagnostics* diagnostics) {
  auto groups = group_regions(regions, params);
  std::vector<Region> out;
  if (params.mode == FusionMode::Select) {
    out = nms_select(groups);
  } else {
    MergeStats stats;
    out = weighted_merge(groups, &stats);
    if (stats.zero_weight_groups && diagnostics) {
      diagnostics->warn(std::to_string(stats.zero_weight_groups) +
                        " merge group(s) had zero total confidence; used unweighted mean");
    }
  }
  sort_canonical(out);
  return out;
}

}  // namespace tilefuse
