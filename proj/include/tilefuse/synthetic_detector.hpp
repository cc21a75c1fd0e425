#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tilefuse/dataset.hpp"
#include "tilefuse/detector.hpp"

namespace tilefuse {

struct ConfidenceRange {
  double lo = 1.0;
  double hi = 1.0;
};

// Test double for a CNN detector: perturbs the ground truth it is given.
struct SyntheticDetectorParams {
  double jitter_px = 0.0;  // max uniform perturbation of each box corner
  double drop_rate = 0.0;  // probability a visible object is missed
  double fp_rate = 0.0;    // expected spurious boxes per tile (Poisson)
  ConfidenceRange true_positive{1.0, 1.0};
  ConfidenceRange false_positive{0.0, 0.3};
  std::uint64_t seed = 0;
  double delay_ms = 0.0;  // artificial per-tile latency

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

// Minimum fraction of an object's area that must lie inside the tile for it
// to be emitted.
inline constexpr double kVisibilityThreshold = 0.25;

// `scaled_gt` is in the scaled-image frame. Randomness is a pure function of
// (params.seed, stream, tile size, tile row/col, object index), so results do
// not depend on call order. Returns tile-local regions.
std::vector<Region> synthetic_detect(std::span<const GroundTruthObject> scaled_gt,
                                     const TileSpec& tile,
                                     const SyntheticDetectorParams& params,
                                     std::string_view stream);

// Looks up the request's image in `truth`. A contract with needs_pixels set
// receives rendered tiles, which are ignored.
class SyntheticDetector : public DetectorBackend {
 public:
  // `truth` must outlive the detector.
  SyntheticDetector(DetectorContract contract, SyntheticDetectorParams params,
                    const GroundTruthSet* truth);

  const DetectorContract& contract() const override { return contract_; }
  std::vector<Region> detect(const TileRequest& request) override;

 private:
  DetectorContract contract_;
  SyntheticDetectorParams params_;
  const GroundTruthSet* truth_;
};

}  // namespace tilefuse
