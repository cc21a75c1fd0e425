#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "tilefuse/diagnostics.hpp"
#include "tilefuse/geometry.hpp"

namespace tilefuse {

enum class OverlapMetric { IoU, IntersectionScore };
enum class FusionMode { Select, WeightedMerge };
enum class CategoryScope { PerCategory, CategoryAgnostic };

struct FusionParams {
  double sigma = 0.5;  // a region joins a group when overlap > sigma
  OverlapMetric metric = OverlapMetric::IoU;
  FusionMode mode = FusionMode::WeightedMerge;
  CategoryScope scope = CategoryScope::PerCategory;

  // Throws std::invalid_argument unless 0 < sigma < 1.
  void validate() const;
};

std::string_view to_string(OverlapMetric m);
std::string_view to_string(FusionMode m);
std::string_view to_string(CategoryScope s);
std::optional<OverlapMetric> parse_metric(std::string_view text);
std::optional<FusionMode> parse_mode(std::string_view text);
std::optional<CategoryScope> parse_scope(std::string_view text);

// For IntersectionScore the seed is the reference (denominator) box.
double overlap(const BBox& seed, const BBox& other, OverlapMetric metric);

struct RegionGroup {
  Region seed;                  // highest-ranked member
  std::vector<Region> members;  // canonical order, seed first
};

// Greedy partition: the best-ranked unassigned region becomes a seed and
// absorbs every unassigned region whose overlap with the seed exceeds sigma.
// Membership is tested against the seed only. Groups come out in seed order.
std::vector<RegionGroup> group_regions(std::span<const Region> regions,
                                       const FusionParams& params);

// Classic NMS: the seed of each group.
std::vector<Region> nms_select(std::span<const RegionGroup> groups);

struct MergeStats {
  std::size_t zero_weight_groups = 0;
};

// Confidence-weighted mean of member coordinates; category and confidence
// come from the seed. A group whose confidences sum to zero falls back to
// the unweighted mean and is counted in `stats`.
std::vector<Region> weighted_merge(std::span<const RegionGroup> groups,
                                   MergeStats* stats = nullptr);

// Group, reduce per params.mode, and return in canonical order.
std::vector<Region> fuse(std::span<const Region> regions,
                         const FusionParams& params,
                         Diagnostics* diagnostics = nullptr);

}  // namespace tilefuse
