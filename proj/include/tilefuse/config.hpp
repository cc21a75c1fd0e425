#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "tilefuse/pipeline.hpp"

namespace tilefuse {

// The bundled five-pipeline configuration (config/default.toml).
std::string_view default_config_text();

// TOML schema:
//   [[pipeline]]  name, scale, overlap_px | overlap_fraction,
//                 confidence_threshold, backend, size_groups
//   [fusion]      sigma, metric ("iou" | "intersection-score"),
//                 mode ("select" | "merge"),
//                 category_scope ("per-category" | "agnostic")
//   [budget]      per_image_seconds, total_seconds, memory_bytes
//   [backend.<name>]
//                 kind ("synthetic" | "external"), tile_sizes, capacity,
//                 jitter_px, drop_rate, fp_rate, tp_confidence = [lo, hi],
//                 fp_confidence = [lo, hi], seed, delay_ms,
//                 command, timeout_seconds
// Built-in backends are always defined and may be overridden. An
// overlap_fraction is converted to pixels of the backend's smallest tile.
// Unknown keys and out-of-range values throw UsageError naming the key.
EnsembleConfig parse_config(std::string_view toml_text, std::string_view source = "config");
EnsembleConfig load_config(const std::filesystem::path& path);
EnsembleConfig default_config();

}  // namespace tilefuse
