#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tilefuse/dataset.hpp"

namespace tilefuse {

// entry(a, b) = number of images containing both category a and b; the
// diagonal counts images containing the category. Indexed by id - 1.
using CooccurrenceMatrix = std::vector<std::vector<int>>;
CooccurrenceMatrix cooccurrence_matrix(const GroundTruthSet& truth);

struct GraphEdge {
  std::size_t a = 0;  // a < b, indices into the input
  std::size_t b = 0;
  double distance = 0.0;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Each box links to its k nearest boxes by center distance (lower index on
// ties). Undirected, deduplicated, ordered by (a, b). Fewer than two boxes
// give no edges.
std::vector<GraphEdge> spatial_graph(std::span<const BBox> boxes, int k);

struct HistogramBin {
  double lo = 0.0;  // inclusive
  double hi = 0.0;  // exclusive, except the last bin
  std::size_t count = 0;
};

// Histogram of max(width, height) over log2-spaced bins from 4 to 4096 px.
// Extents outside the range land in the first or last bin.
std::vector<HistogramBin> size_histogram(const GroundTruthSet& truth);

}  // namespace tilefuse
