#pragma once

#include <map>
#include <string>
#include <vector>

#include "tilefuse/geometry.hpp"

namespace tilefuse {

struct GroundTruthObject {
  BBox box;
  int category = 0;

  friend bool operator==(const GroundTruthObject&,
                         const GroundTruthObject&) = default;
};

// Keyed by image id. std::map keeps iteration order independent of insertion.
using GroundTruthSet = std::map<std::string, std::vector<GroundTruthObject>>;
using DetectionSet = std::map<std::string, std::vector<Region>>;

}  // namespace tilefuse
