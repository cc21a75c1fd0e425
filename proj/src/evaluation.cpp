#include "tilefuse/evaluation.hpp"

#include <algorithm>
#include <numeric>

#include "tilefuse/categories.hpp"
#include "tilefuse/error.hpp"

namespace tilefuse {

std::vector<MatchRecord> match_detections(std::span<const Region> detections,
                                          std::span<const GroundTruthObject> truth,
                                          double iou_min, IouComparator comparator) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return canonical_less(detections[a], detections[b]);
  });

  auto passes = [&](double v) {
    return comparator == IouComparator::Greater ? v > iou_min : v >= iou_min;
  };

  std::vector<char> taken(truth.size(), 0);
  std::vector<MatchRecord> records;
  records.reserve(detections.size());
  for (std::size_t d : order) {
    const Region& det = detections[d];
    double best = -1.0;
    std::size_t best_index = 0;
    for (std::size_t g = 0; g < truth.size(); ++g) {
      if (taken[g] || truth[g].category != det.category) continue;
      double v = iou(det.box, truth[g].box);
      if (v > best) {
        best = v;
        best_index = g;
      }
    }
    MatchRecord rec{d, false, 0, det.confidence};
    if (best >= 0.0 && passes(best)) {
      taken[best_index] = 1;
      rec.true_positive = true;
      rec.gt_index = best_index;
    }
    records.push_back(rec);
  }
  return records;
}

double average_precision(std::span<const RankedOutcome> outcomes, std::size_t gt_count,
                         ApInterpolation interpolation) {
  if (gt_count == 0) return 0.0;
  std::vector<RankedOutcome> ranked(outcomes.begin(), outcomes.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.confidence > b.confidence; });

  const std::size_t n = ranked.size();
  std::vector<double> precision(n), recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ranked[i].true_positive) ++tp;
    precision[i] = double(tp) / double(i + 1);
    recall[i] = double(tp) / double(gt_count);
  }
  // Max-envelope: interpolated precision at rank i is the best precision at
  // any rank >= i, i.e. at any recall >= recall[i].
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double ap = 0.0;
  if (interpolation == ApInterpolation::AllPoint) {
    double prev_recall = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (recall[i] > prev_recall) {
        ap += (recall[i] - prev_recall) * precision[i];
        prev_recall = recall[i];
      }
    }
  } else {
    for (int k = 0; k <= 10; ++k) {
      double r = k / 10.0;
      auto it = std::find_if(recall.begin(), recall.end(),
                             [&](double v) { return v >= r - 1e-12; });
      if (it != recall.end()) ap += precision[std::size_t(it - recall.begin())];
    }
    ap /= 11.0;
  }
  return std::clamp(ap, 0.0, 1.0);
}

EvalReport evaluate(const DetectionSet& detections, const GroundTruthSet& truth,
                    const EvalOptions& options) {
  std::vector<std::string> unknown;
  for (const auto& [id, dets] : detections) {
    if (!dets.empty() && !truth.contains(id)) unknown.push_back(id);
  }
  if (!unknown.empty()) {
    std::string msg = "detections reference unknown image id(s):";
    for (const auto& id : unknown) msg += " " + id;
    throw DataError(msg);
  }

  struct Pooled {
    double confidence;
    const std::string* image;
    std::size_t rank;
    bool tp;
  };
  std::vector<std::vector<Pooled>> pooled(kNumCategories + 1);
  EvalReport report;
  report.categories.resize(kNumCategories);
  for (int c = 1; c <= kNumCategories; ++c) report.categories[c - 1].category = c;

  static const std::vector<Region> kNone;
  for (const auto& [id, gts] : truth) {
    ++report.images;
    for (const auto& g : gts) {
      (void)category_info(g.category);
      ++report.categories[g.category - 1].ground_truth;
    }
    auto it = detections.find(id);
    const auto& dets = it == detections.end() ? kNone : it->second;
    report.detections += dets.size();
    auto records = match_detections(dets, gts, options.iou_min, options.comparator);
    for (std::size_t rank = 0; rank < records.size(); ++rank) {
      const auto& rec = records[rank];
      const Region& det = dets[rec.detection];
      (void)category_info(det.category);
      auto& stats = report.categories[det.category - 1];
      if (rec.true_positive) ++stats.true_positives;
      else ++stats.false_positives;
      pooled[det.category].push_back({rec.confidence, &id, rank, rec.true_positive});
    }
  }

  double sum = 0.0;
  std::size_t included = 0;
  for (int c = 1; c <= kNumCategories; ++c) {
    auto& stats = report.categories[c - 1];
    stats.false_negatives = stats.ground_truth - stats.true_positives;
    if (stats.ground_truth == 0) continue;
    auto& list = pooled[c];
    // Image id then in-image rank breaks confidence ties deterministically.
    std::sort(list.begin(), list.end(), [](const Pooled& a, const Pooled& b) {
      if (a.confidence != b.confidence) return a.confidence > b.confidence;
      if (*a.image != *b.image) return *a.image < *b.image;
      return a.rank < b.rank;
    });
    std::vector<RankedOutcome> outcomes;
    outcomes.reserve(list.size());
    for (const auto& p : list) outcomes.push_back({p.confidence, p.tp});
    stats.ap = average_precision(outcomes, stats.ground_truth, options.interpolation);
    sum += *stats.ap;
    ++included;
  }
  report.map = included ? sum / double(included) : 0.0;

  auto subset_mean = [&](auto&& member) -> std::optional<double> {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& stats : report.categories) {
      if (stats.ap && member(stats.category)) {
        s += *stats.ap;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return s / double(n);
  };
  for (auto g : {SizeGroup::Small, SizeGroup::Medium, SizeGroup::Large}) {
    report.subsets[std::string(to_string(g))] =
        subset_mean([g](int c) { return size_group_of(c) == g; });
  }
  for (auto r : {Rarity::Common, Rarity::Rare}) {
    report.subsets[std::string(to_string(r))] =
        subset_mean([r](int c) { return rarity_of(c) == r; });
  }
  return report;
}

}  // namespace tilefuse
