#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "tilefuse/dataset.hpp"

namespace tilefuse {

struct GroundTruthLoadOptions {
  // Interpret `type_id` as a raw xView label id (11..94) instead of a dense
  // category id in [1, 60].
  bool xview_type_ids = false;
};

struct GroundTruthLoad {
  GroundTruthSet truth;
  std::size_t dropped_degenerate = 0;
};

// GeoJSON FeatureCollection; each feature carries properties `image_id`,
// `type_id` and `bounds_imcoords` ("x1,y1,x2,y2"). A trailing image
// extension on `image_id` is dropped so ids match file stems. Zero or
// negative extent boxes are dropped and counted. Throws DataError with the
// feature index on malformed input.
GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const GroundTruthLoadOptions& options = {});
GroundTruthLoad parse_ground_truth(const std::string& geojson,
                                   const GroundTruthLoadOptions& options = {});
void write_ground_truth(const std::filesystem::path& path, const GroundTruthSet& truth);

// Detection interchange: one `<image_id> <x1> <y1> <x2> <y2> <category_id>
// <confidence>` line per region, coordinates with 2 decimals and confidence
// with 4. Values are rounded to that precision before sorting, so a
// written file reads back and rewrites byte-identically.
void write_detections(std::ostream& out, const DetectionSet& detections);
void write_detections(const std::filesystem::path& path, const DetectionSet& detections);
// Throws DataError with the 1-based line number on a malformed line.
DetectionSet read_detections(std::istream& in);
DetectionSet read_detections(const std::filesystem::path& path);

std::string strip_image_extension(const std::string& image_id);

}  // namespace tilefuse
