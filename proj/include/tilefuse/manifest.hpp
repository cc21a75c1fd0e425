#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tilefuse/budget.hpp"
#include "tilefuse/fusion.hpp"

namespace tilefuse {

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

// Provenance and telemetry for one run; written next to its detection file.
struct RunManifest {
  std::string config_path;
  std::string config_sha256;
  std::vector<std::string> images;
  // image id -> pipeline name -> regions after threshold and size filter
  std::map<std::string, std::map<std::string, std::size_t>> pipeline_counts;
  std::map<std::string, std::size_t> fused_counts;
  FusionParams fusion;
  BudgetConfig budget;
  std::optional<BudgetKind> budget_exceeded;
  bool partial = false;
  double wall_clock_seconds = 0.0;
  double detector_seconds = 0.0;
  std::uint64_t peak_memory_bytes = 0;
  std::size_t warnings = 0;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string detections_path;
  std::string detections_sha256;

  std::string to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace tilefuse
