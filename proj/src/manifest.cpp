#include "tilefuse/manifest.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tilefuse/error.hpp"

namespace tilefuse {

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw DataError("SHA-256 failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["config"] = {{"path", config_path}, {"sha256", config_sha256}};
  j["images"] = images;
  j["pipeline_counts"] = pipeline_counts;
  j["fused_counts"] = fused_counts;
  j["fusion"] = {{"sigma", fusion.sigma},
                 {"metric", std::string(to_string(fusion.metric))},
                 {"mode", std::string(to_string(fusion.mode))},
                 {"category_scope", std::string(to_string(fusion.scope))}};
  j["budget"] = {
      {"limits",
       {{"per_image_seconds", budget.per_image_seconds},
        {"total_seconds", budget.total_seconds},
        {"memory_bytes", budget.memory_bytes}}},
      {"outcome", budget_exceeded ? "exceeded" : "ok"},
      {"exceeded_kind",
       budget_exceeded ? nlohmann::json(std::string(to_string(*budget_exceeded))) : nullptr},
      {"partial", partial}};
  j["telemetry"] = {{"wall_clock_seconds", wall_clock_seconds},
                    {"detector_seconds", detector_seconds},
                    {"peak_memory_bytes", peak_memory_bytes},
                    {"warnings", warnings},
                    {"workers", workers}};
  j["seed"] = seed;
  j["detections"] = {{"path", detections_path}, {"sha256", detections_sha256}};
  return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << manifest.to_json() << '\n';
}

}  // namespace tilefuse
