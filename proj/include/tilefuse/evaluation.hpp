#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tilefuse/dataset.hpp"
#include "tilefuse/geometry.hpp"

namespace tilefuse {

// Whether a detection needs IoU strictly above the threshold or at least it.
enum class IouComparator { Greater, GreaterEqual };
enum class ApInterpolation { AllPoint, ElevenPoint };

struct EvalOptions {
  double iou_min = 0.5;
  IouComparator comparator = IouComparator::Greater;
  ApInterpolation interpolation = ApInterpolation::AllPoint;
};

struct MatchRecord {
  std::size_t detection = 0;  // index into the detection list
  bool true_positive = false;
  std::size_t gt_index = 0;   // meaningful for true positives only
  double confidence = 0.0;
};

// Greedy matching in canonical detection order. Each detection takes the
// unmatched same-category ground truth with the highest IoU (lowest index on
// ties) if that IoU passes the comparator; otherwise it is a false positive.
// Records come back in processing order.
std::vector<MatchRecord> match_detections(std::span<const Region> detections,
                                          std::span<const GroundTruthObject> truth,
                                          double iou_min,
                                          IouComparator comparator = IouComparator::Greater);

struct RankedOutcome {
  double confidence = 0.0;
  bool true_positive = false;
};

// Area under the interpolated precision/recall curve, where interpolated
// precision at recall r is the best precision at any recall >= r. Outcomes
// are ranked by confidence, descending (stable for equal scores).
double average_precision(std::span<const RankedOutcome> outcomes, std::size_t gt_count,
                         ApInterpolation interpolation = ApInterpolation::AllPoint);

struct CategoryResult {
  int category = 0;
  std::size_t ground_truth = 0;
  std::size_t true_positives = 0;
  std::size_t false_positives = 0;
  std::size_t false_negatives = 0;
  // nullopt when the category has no ground truth; such categories are left
  // out of every mean.
  std::optional<double> ap;
};

struct EvalReport {
  std::vector<CategoryResult> categories;  // one per category id, in order
  double map = 0.0;
  // Keys: small, medium, large, common, rare. nullopt when the subset has no
  // category with ground truth.
  std::map<std::string, std::optional<double>> subsets;
  std::size_t images = 0;
  std::size_t detections = 0;
};

// Pools matches over all images per category before building each curve.
// Throws DataError listing detection image ids absent from the ground truth.
EvalReport evaluate(const DetectionSet& detections, const GroundTruthSet& truth,
                    const EvalOptions& options = {});

}  // namespace tilefuse
