#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tilefuse/backends.hpp"
#include "tilefuse/budget.hpp"
#include "tilefuse/categories.hpp"
#include "tilefuse/diagnostics.hpp"
#include "tilefuse/fusion.hpp"
#include "tilefuse/geometry.hpp"
#include "tilefuse/image.hpp"
#include "tilefuse/memory.hpp"

namespace tilefuse {

// One scale/tile/detect/threshold/filter pipeline.
struct PipelineConfig {
  std::string name;
  ScaleFactor scale{1.0};
  int overlap_px = 0;               // in the scaled frame
  double confidence_threshold = 0;  // regions below it are removed
  std::string backend;
  SizeGroupSet size_groups = kAllSizeGroups;
};

struct EnsembleConfig {
  std::vector<PipelineConfig> pipelines;
  FusionParams fusion;
  BudgetConfig budget;
  std::vector<BackendSpec> backends;

  const BackendSpec* find_backend(const std::string& name) const;
  // Checks every cross-field invariant (threshold range, overlap below the
  // backend's smallest tile, known backends, at least one pipeline).
  // Throws UsageError naming the offending pipeline and key.
  void validate() const;
};

struct ImageSource {
  std::string id;
  std::filesystem::path path;  // decoded only for backends that need pixels
  int width = 0;
  int height = 0;
  const Image* pixels = nullptr;  // optional preloaded pixels
};

// Opens the header of an image file; the id is the file stem.
ImageSource open_image(const std::filesystem::path& path);

struct RunContext {
  int workers = 1;
  MemoryTracker* memory = nullptr;
  BudgetMonitor* budget = nullptr;
  Diagnostics* diagnostics = nullptr;
};

struct PipelineResult {
  std::string pipeline;
  std::vector<Region> regions;  // original frame, canonical order
  std::size_t tiles_planned = 0;
  std::size_t tiles_run = 0;
  double detector_seconds = 0.0;  // summed over backend calls
  BudgetStatus budget;
  bool partial() const { return budget.exceeded; }
};

// Scale, split, detect, map tile -> scaled -> original, clip to the image,
// drop regions below the threshold, filter by size group, sort.
PipelineResult run_pipeline(const ImageSource& image, const PipelineConfig& config,
                            DetectorBackend& backend, RunContext& ctx);

struct EnsembleResult {
  std::vector<Region> fused;
  std::vector<PipelineResult> pipelines;
  BudgetStatus budget;
  std::size_t failed_pipelines = 0;
  bool partial() const { return budget.exceeded; }
};

// Runs every pipeline on one image and fuses the pooled candidates. A
// pipeline that throws is logged and skipped; a tripped budget stops the
// remaining pipelines and fuses what was gathered.
EnsembleResult run_ensemble(const ImageSource& image, const EnsembleConfig& config,
                            const BackendRegistry& backends, RunContext& ctx);

}  // namespace tilefuse
