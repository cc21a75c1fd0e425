#include "tilefuse/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tilefuse/categories.hpp"
#include "tilefuse/error.hpp"

namespace tilefuse {
namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool parse_double(std::string_view token, double& out) {
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size() && std::isfinite(out);
}

double quantize(double v, double scale) {
  double q = std::round(v * scale) / scale;
  return q == 0.0 ? 0.0 : q;  // no "-0.00"
}

}  // namespace

std::string strip_image_extension(const std::string& image_id) {
  for (const char* ext : {".tif", ".tiff", ".png", ".TIF", ".TIFF", ".PNG"}) {
    std::string_view e(ext);
    if (image_id.size() > e.size() &&
        image_id.compare(image_id.size() - e.size(), e.size(), e) == 0) {
      return image_id.substr(0, image_id.size() - e.size());
    }
  }
  return image_id;
}

GroundTruthLoad parse_ground_truth(const std::string& geojson,
                                   const GroundTruthLoadOptions& options) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw DataError("GeoJSON must be a FeatureCollection with a 'features' array");
  }

  GroundTruthLoad out;
  const auto& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const std::string where = "feature " + std::to_string(i) + ": ";
    const auto& f = features[i];
    if (!f.is_object() || !f.contains("properties") || !f["properties"].is_object()) {
      throw DataError(where + "missing 'properties'");
    }
    const auto& p = f["properties"];
    for (const char* key : {"image_id", "type_id", "bounds_imcoords"}) {
      if (!p.contains(key)) throw DataError(where + "missing property '" + key + "'");
    }
    if (!p["image_id"].is_string()) throw DataError(where + "'image_id' must be a string");
    if (!p["type_id"].is_number_integer()) throw DataError(where + "'type_id' must be an integer");
    if (!p["bounds_imcoords"].is_string()) {
      throw DataError(where + "'bounds_imcoords' must be a string");
    }

    int type_id = p["type_id"].get<int>();
    int category = type_id;
    if (options.xview_type_ids) {
      auto mapped = category_from_xview_type(type_id);
      if (!mapped) throw DataError(where + "unknown xView type_id " + std::to_string(type_id));
      category = *mapped;
    } else if (type_id < 1 || type_id > kNumCategories) {
      throw DataError(where + "type_id " + std::to_string(type_id) + " outside [1, " +
                      std::to_string(kNumCategories) + "]");
    }

    std::string bounds = p["bounds_imcoords"].get<std::string>();
    double v[4];
    std::size_t start = 0;
    for (int k = 0; k < 4; ++k) {
      std::size_t comma = bounds.find(',', start);
      bool last = k == 3;
      if (last != (comma == std::string::npos)) {
        throw DataError(where + "bounds_imcoords must be 'x1,y1,x2,y2'");
      }
      std::string_view token(bounds.data() + start,
                             (last ? bounds.size() : comma) - start);
      while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
      while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
      if (!parse_double(token, v[k])) {
        throw DataError(where + "bad coordinate in bounds_imcoords '" + bounds + "'");
      }
      start = comma + 1;
    }
    BBox box{v[0], v[1], v[2], v[3]};
    if (!box.is_valid()) {
      ++out.dropped_degenerate;
      continue;
    }
    auto id = strip_image_extension(p["image_id"].get<std::string>());
    out.truth[id].push_back({box, category});
  }
  return out;
}

GroundTruthLoad load_ground_truth(const std::filesystem::path& path,
                                  const GroundTruthLoadOptions& options) {
  return parse_ground_truth(read_file(path), options);
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruthSet& truth) {
  json features = json::array();
  for (const auto& [id, objects] : truth) {
    for (const auto& o : objects) {
      char bounds[128];
      std::snprintf(bounds, sizeof bounds, "%.2f,%.2f,%.2f,%.2f", o.box.x1, o.box.y1,
                    o.box.x2, o.box.y2);
      features.push_back({{"type", "Feature"},
                          {"geometry", nullptr},
                          {"properties",
                           {{"image_id", id}, {"type_id", o.category},
                            {"bounds_imcoords", bounds}}}});
    }
  }
  json doc = {{"type", "FeatureCollection"}, {"features", features}};
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

void write_detections(std::ostream& out, const DetectionSet& detections) {
  char line[256];
  for (const auto& [id, regions] : detections) {
    if (id.empty() || id.find_first_of(" \t\n") != std::string::npos) {
      throw DataError("image id '" + id + "' cannot be written (empty or whitespace)");
    }
    std::vector<Region> q;
    q.reserve(regions.size());
    for (const auto& r : regions) {
      Region x{{quantize(r.box.x1, 100), quantize(r.box.y1, 100), quantize(r.box.x2, 100),
                quantize(r.box.y2, 100)},
               r.category,
               quantize(r.confidence, 10000)};
      if (!x.is_valid()) {
        throw DataError("region in image '" + id + "' is invalid at output precision");
      }
      q.push_back(x);
    }
    sort_canonical(q);
    for (const auto& r : q) {
      std::snprintf(line, sizeof line, "%s %.2f %.2f %.2f %.2f %d %.4f\n", id.c_str(),
                    r.box.x1, r.box.y1, r.box.x2, r.box.y2, r.category, r.confidence);
      out << line;
    }
  }
}

void write_detections(const std::filesystem::path& path, const DetectionSet& detections) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  write_detections(out, detections);
  if (!out) throw DataError("write failed for " + path.string());
}

DetectionSet read_detections(std::istream& in) {
  DetectionSet set;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(number) + ": ";

    std::istringstream ls(line);
    std::string tok[7], extra;
    for (auto& t : tok) {
      if (!(ls >> t)) throw DataError(where + "expected 7 fields");
    }
    if (ls >> extra) throw DataError(where + "expected 7 fields");

    Region r;
    if (!parse_double(tok[1], r.box.x1) || !parse_double(tok[2], r.box.y1) ||
        !parse_double(tok[3], r.box.x2) || !parse_double(tok[4], r.box.y2) ||
        !parse_double(tok[6], r.confidence)) {
      throw DataError(where + "non-numeric field");
    }
    auto [ptr, ec] = std::from_chars(tok[5].data(), tok[5].data() + tok[5].size(), r.category);
    if (ec != std::errc() || ptr != tok[5].data() + tok[5].size()) {
      throw DataError(where + "category must be an integer");
    }
    if (!r.box.is_valid()) throw DataError(where + "box must have positive extent");
    if (r.category < 1 || r.category > kNumCategories) {
      throw DataError(where + "category " + tok[5] + " outside [1, " +
                      std::to_string(kNumCategories) + "]");
    }
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw DataError(where + "confidence " + tok[6] + " outside [0, 1]");
    }
    set[tok[0]].push_back(r);
  }
  for (auto& [id, regions] : set) sort_canonical(regions);
  return set;
}

DetectionSet read_detections(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return read_detections(in);
}

}  // namespace tilefuse
