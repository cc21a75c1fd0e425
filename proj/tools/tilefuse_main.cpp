// tilefuse command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 budget exceeded.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tilefuse/analysis.hpp"
#include "tilefuse/backends.hpp"
#include "tilefuse/categories.hpp"
#include "tilefuse/config.hpp"
#include "tilefuse/error.hpp"
#include "tilefuse/evaluation.hpp"
#include "tilefuse/fusion.hpp"
#include "tilefuse/io.hpp"
#include "tilefuse/manifest.hpp"
#include "tilefuse/pipeline.hpp"
#include "tilefuse/scene.hpp"
#include "tilefuse/tiling.hpp"

namespace fs = std::filesystem;
using namespace tilefuse;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitBudget = 3;

// --workers beats TILEFUSE_WORKERS, which beats the hardware thread count.
int resolve_workers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("TILEFUSE_WORKERS"); env && *env) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) {
      throw UsageError(std::string("TILEFUSE_WORKERS must be an integer in [1, 1024], got '") +
                       env + "'");
    }
    return int(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

struct LoadedConfig {
  EnsembleConfig config;
  std::string path;
  std::string sha256;
};

LoadedConfig load_named_config(const std::string& path) {
  if (path.empty() || path == "default") {
    return {default_config(), "default", sha256_hex(default_config_text())};
  }
  auto cfg = load_config(path);
  return {std::move(cfg), path, sha256_file(path)};
}

std::vector<fs::path> list_images(const fs::path& where) {
  std::vector<fs::path> out;
  if (fs::is_regular_file(where)) {
    out.push_back(where);
    return out;
  }
  if (!fs::is_directory(where)) throw UsageError("--images: no such directory " + where.string());
  for (const auto& e : fs::directory_iterator(where)) {
    if (e.is_regular_file() && is_supported_image(e.path())) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  if (out.empty()) throw DataError("no PNG or TIFF images in " + where.string());
  return out;
}

std::optional<GroundTruthSet> load_optional_truth(const std::string& path, bool xview_ids,
                                                  Diagnostics& diag) {
  if (path.empty()) return std::nullopt;
  auto load = load_ground_truth(path, {xview_ids});
  if (load.dropped_degenerate > 0) {
    diag.warn(path + ": dropped " + std::to_string(load.dropped_degenerate) +
              " degenerate boxes");
  }
  return std::move(load.truth);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

// ---- plan ----------------------------------------------------------------

struct PlanArgs {
  int width = 0, height = 0, tile = 300, overlap = 0;
  double scale = 1.0;
};

int run_plan(const PlanArgs& a) {
  ScaleFactor s(a.scale);
  TilePlan plan;
  try {
    plan = plan_tiles(scaled_extent(a.width, s), scaled_extent(a.height, s), a.tile, a.overlap);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::printf("row,col,x,y,width,height,needs_padding\n");
  for (const auto& t : plan.tiles) {
    std::printf("%d,%d,%d,%d,%d,%d,%d\n", t.row, t.col, t.origin_x, t.origin_y, t.width,
                t.height, t.needs_padding ? 1 : 0);
  }
  return kExitOk;
}

// ---- detect / ensemble ---------------------------------------------------

struct RunArgs {
  std::string images;  // directory (ensemble) or file (detect)
  std::string pipeline;
  std::string config;
  std::string out;
  std::string manifest;
  std::string gt;
  bool xview_type_ids = false;
  std::uint64_t seed = 0;
  int workers = 0;
  bool quiet = false;
};

int run_detect(const RunArgs& a) {
  Diagnostics diag(!a.quiet);
  auto loaded = load_named_config(a.config);
  const PipelineConfig* pipeline = nullptr;
  for (const auto& p : loaded.config.pipelines) {
    if (p.name == a.pipeline) pipeline = &p;
  }
  if (!pipeline) throw UsageError("--pipeline: no pipeline named '" + a.pipeline + "'");
  auto truth = load_optional_truth(a.gt, a.xview_type_ids, diag);
  auto registry = make_backends(loaded.config.backends, truth ? &*truth : nullptr, a.seed);

  MemoryTracker memory;
  BudgetMonitor budget(loaded.config.budget, &memory);
  RunContext ctx{resolve_workers(a.workers), &memory, &budget, &diag};
  ImageSource image = open_image(a.images);
  budget.start_image();
  auto result = run_pipeline(image, *pipeline, registry.get(pipeline->backend), ctx);

  DetectionSet dets{{image.id, result.regions}};
  write_detections(fs::path(a.out), dets);
  if (result.partial()) {
    std::fprintf(stderr, "budget exceeded (%s): partial output after %zu of %zu tiles\n",
                 std::string(to_string(result.budget.kind)).c_str(), result.tiles_run,
                 result.tiles_planned);
    return kExitBudget;
  }
  return kExitOk;
}

int run_ensemble_command(const RunArgs& a) {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  Diagnostics diag(!a.quiet);
  auto loaded = load_named_config(a.config);
  auto truth = load_optional_truth(a.gt, a.xview_type_ids, diag);
  auto paths = list_images(a.images);
  auto registry = make_backends(loaded.config.backends, truth ? &*truth : nullptr, a.seed);

  MemoryTracker memory;
  BudgetMonitor budget(loaded.config.budget, &memory);
  RunContext ctx{resolve_workers(a.workers), &memory, &budget, &diag};

  RunManifest manifest;
  manifest.config_path = loaded.path;
  manifest.config_sha256 = loaded.sha256;
  manifest.fusion = loaded.config.fusion;
  manifest.budget = loaded.config.budget;
  manifest.seed = a.seed;
  manifest.workers = ctx.workers;

  DetectionSet dets;
  for (const auto& path : paths) {
    ImageSource image = open_image(path);
    if (dets.contains(image.id)) throw DataError("duplicate image id '" + image.id + "'");
    manifest.images.push_back(image.id);
    budget.start_image();
    auto result = run_ensemble(image, loaded.config, registry, ctx);
    for (const auto& p : result.pipelines) {
      manifest.pipeline_counts[image.id][p.pipeline] = p.regions.size();
      manifest.detector_seconds += p.detector_seconds;
    }
    manifest.fused_counts[image.id] = result.fused.size();
    dets[image.id] = std::move(result.fused);
    if (result.partial()) {
      manifest.partial = true;
      manifest.budget_exceeded = result.budget.kind;
      break;
    }
  }

  write_detections(fs::path(a.out), dets);
  manifest.detections_path = a.out;
  manifest.detections_sha256 = sha256_file(a.out);
  manifest.peak_memory_bytes = memory.peak();
  manifest.warnings = diag.count();
  manifest.wall_clock_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  write_manifest(a.manifest.empty() ? fs::path(a.out + ".manifest.json") : fs::path(a.manifest),
                 manifest);

  if (manifest.partial) {
    std::fprintf(stderr, "budget exceeded (%s): partial output for %zu of %zu images\n",
                 std::string(to_string(*manifest.budget_exceeded)).c_str(),
                 manifest.images.size(), paths.size());
    return kExitBudget;
  }
  return kExitOk;
}

// ---- fuse ----------------------------------------------------------------

struct FuseArgs {
  std::vector<std::string> inputs;
  double sigma = 0.5;
  std::string metric = "iou";
  std::string mode = "merge";
  std::string scope = "per-category";
  std::string out;
};

int run_fuse(const FuseArgs& a) {
  FusionParams params;
  params.sigma = a.sigma;
  auto metric = parse_metric(a.metric);
  auto mode = parse_mode(a.mode);
  auto scope = parse_scope(a.scope);
  if (!metric) throw UsageError("--metric must be iou or is");
  if (!mode) throw UsageError("--mode must be select or merge");
  if (!scope) throw UsageError("--scope must be per-category or agnostic");
  params.metric = *metric;
  params.mode = *mode;
  params.scope = *scope;
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--sigma: ") + e.what());
  }

  DetectionSet pooled;
  for (const auto& in : a.inputs) {
    for (auto& [id, regions] : read_detections(fs::path(in))) {
      auto& dst = pooled[id];
      dst.insert(dst.end(), regions.begin(), regions.end());
    }
  }
  Diagnostics diag(true);
  DetectionSet fused;
  for (const auto& [id, regions] : pooled) fused[id] = fuse(regions, params, &diag);
  write_detections(fs::path(a.out), fused);
  return kExitOk;
}

// ---- eval ----------------------------------------------------------------

struct EvalArgs {
  std::string gt;
  std::string dets;
  double iou_min = 0.5;
  bool inclusive = false;
  bool eleven_point = false;
  bool xview_type_ids = false;
  std::string report;
};

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

int run_eval(const EvalArgs& a) {
  if (!(a.iou_min > 0.0 && a.iou_min < 1.0)) throw UsageError("--iou-min must be in (0, 1)");
  Diagnostics diag(true);
  auto truth = *load_optional_truth(a.gt, a.xview_type_ids, diag);
  auto dets = read_detections(fs::path(a.dets));
  EvalOptions opts;
  opts.iou_min = a.iou_min;
  opts.comparator = a.inclusive ? IouComparator::GreaterEqual : IouComparator::Greater;
  opts.interpolation = a.eleven_point ? ApInterpolation::ElevenPoint : ApInterpolation::AllPoint;
  auto report = evaluate(dets, truth, opts);

  std::printf("%-4s %-28s %7s %7s %7s %7s %8s\n", "id", "category", "gt", "tp", "fp", "fn",
              "ap");
  for (const auto& c : report.categories) {
    if (!c.ap && c.false_positives == 0) continue;
    std::string ap = c.ap ? std::to_string(*c.ap).substr(0, 6) : "-";
    std::printf("%-4d %-28s %7zu %7zu %7zu %7zu %8s\n", c.category,
                std::string(category_info(c.category).name).c_str(), c.ground_truth,
                c.true_positives, c.false_positives, c.false_negatives, ap.c_str());
  }
  std::printf("\nmAP %.4f over %zu images, %zu detections\n", report.map, report.images,
              report.detections);
  for (const auto& [name, v] : report.subsets) {
    if (v) std::printf("  %-7s %.4f\n", name.c_str(), *v);
    else std::printf("  %-7s -\n", name.c_str());
  }

  if (!a.report.empty()) {
    nlohmann::json j;
    j["iou_min"] = a.iou_min;
    j["comparator"] = a.inclusive ? ">=" : ">";
    j["interpolation"] = a.eleven_point ? "11-point" : "all-point";
    j["map"] = report.map;
    j["images"] = report.images;
    j["detections"] = report.detections;
    for (const auto& [name, v] : report.subsets) j["subsets"][name] = optional_json(v);
    j["categories"] = nlohmann::json::array();
    for (const auto& c : report.categories) {
      j["categories"].push_back({{"id", c.category},
                                 {"name", std::string(category_info(c.category).name)},
                                 {"ground_truth", c.ground_truth},
                                 {"true_positives", c.true_positives},
                                 {"false_positives", c.false_positives},
                                 {"false_negatives", c.false_negatives},
                                 {"ap", optional_json(c.ap)}});
    }
    write_text(a.report, j.dump(2) + "\n");
  }
  return kExitOk;
}

// ---- analyze -------------------------------------------------------------

struct AnalyzeArgs {
  std::string gt;
  std::string cooccurrence;
  std::string graph;
  std::string histogram;
  int k = 3;
  bool xview_type_ids = false;
};

int run_analyze(const AnalyzeArgs& a) {
  if (a.k < 1) throw UsageError("--k must be >= 1");
  if (a.cooccurrence.empty() && a.graph.empty() && a.histogram.empty()) {
    throw UsageError("nothing to do: give --cooccurrence, --graph or --histogram");
  }
  Diagnostics diag(true);
  auto truth = *load_optional_truth(a.gt, a.xview_type_ids, diag);

  if (!a.cooccurrence.empty()) {
    auto m = cooccurrence_matrix(truth);
    std::string csv = "category";
    for (int j = 1; j <= kNumCategories; ++j) csv += "," + std::to_string(j);
    csv += "\n";
    for (int i = 0; i < kNumCategories; ++i) {
      csv += std::to_string(i + 1);
      for (int j = 0; j < kNumCategories; ++j) csv += "," + std::to_string(m[i][j]);
      csv += "\n";
    }
    write_text(a.cooccurrence, csv);
  }

  if (!a.graph.empty()) {
    std::string dot = "graph spatial {\n";
    int cluster = 0;
    for (const auto& [id, objects] : truth) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "  subgraph cluster_%d {\n    label=\"%s\";\n", cluster,
                    id.c_str());
      dot += buf;
      std::vector<BBox> boxes;
      for (std::size_t i = 0; i < objects.size(); ++i) {
        boxes.push_back(objects[i].box);
        std::snprintf(buf, sizeof buf, "    n%d_%zu [label=\"%s\"];\n", cluster, i,
                      std::string(category_info(objects[i].category).name).c_str());
        dot += buf;
      }
      for (const auto& e : spatial_graph(boxes, a.k)) {
        std::snprintf(buf, sizeof buf, "    n%d_%zu -- n%d_%zu [len=%.2f];\n", cluster, e.a,
                      cluster, e.b, e.distance);
        dot += buf;
      }
      dot += "  }\n";
      ++cluster;
    }
    dot += "}\n";
    write_text(a.graph, dot);
  }

  if (!a.histogram.empty()) {
    std::string csv = "lo,hi,count\n";
    for (const auto& b : size_histogram(truth)) {
      char buf[96];
      std::snprintf(buf, sizeof buf, "%g,%g,%zu\n", b.lo, b.hi, b.count);
      csv += buf;
    }
    write_text(a.histogram, csv);
  }
  return kExitOk;
}

// ---- synth ---------------------------------------------------------------

struct SynthArgs {
  std::string out;
  int count = 10;
  SceneSpec spec;
  bool no_images = false;
};

int run_synth(const SynthArgs& a) {
  if (a.count < 1) throw UsageError("--count must be >= 1");
  if (a.spec.width < 1 || a.spec.height < 1) throw UsageError("--width/--height must be >= 1");
  fs::create_directories(a.out);
  auto truth = generate_scenes(a.spec, a.count);
  if (!a.no_images) {
    for (const auto& [id, objects] : truth) {
      write_png(fs::path(a.out) / (id + ".png"), render_scene(a.spec.width, a.spec.height, objects));
    }
  }
  write_ground_truth(fs::path(a.out) / "gt.geojson", truth);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiled multi-pipeline object detection with ensemble fusion"};
  app.require_subcommand(1);

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Print the tile grid as CSV");
  plan_cmd->add_option("--width", plan.width, "Image width")->required();
  plan_cmd->add_option("--height", plan.height, "Image height")->required();
  plan_cmd->add_option("--tile", plan.tile, "Tile edge in pixels")->capture_default_str();
  plan_cmd->add_option("--overlap", plan.overlap, "Overlap in pixels")->capture_default_str();
  plan_cmd->add_option("--scale", plan.scale, "Scale applied before tiling")->capture_default_str();

  RunArgs run;
  auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", run.config, "Ensemble TOML (\"default\" for the bundled one)");
    cmd->add_option("--out", run.out, "Detection file to write")->required();
    cmd->add_option("--gt", run.gt, "GeoJSON truth fed to synthetic backends");
    cmd->add_flag("--xview-type-ids", run.xview_type_ids, "type_id holds raw xView label ids");
    cmd->add_option("--seed", run.seed, "Run seed")->capture_default_str();
    cmd->add_option("--workers", run.workers, "Worker threads (overrides TILEFUSE_WORKERS)");
    cmd->add_flag("--quiet", run.quiet, "Do not echo warnings");
  };
  auto* detect_cmd = app.add_subcommand("detect", "Run one pipeline on one image");
  detect_cmd->add_option("--image", run.images, "Input image")->required();
  detect_cmd->add_option("--pipeline", run.pipeline, "Pipeline name")->required();
  add_run_options(detect_cmd);

  auto* ensemble_cmd = app.add_subcommand("ensemble", "Run every pipeline and fuse");
  ensemble_cmd->add_option("--images", run.images, "Image directory or file")->required();
  ensemble_cmd->add_option("--manifest", run.manifest, "Manifest path (default <out>.manifest.json)");
  add_run_options(ensemble_cmd);

  FuseArgs fuse_args;
  auto* fuse_cmd = app.add_subcommand("fuse", "Fuse detection files");
  fuse_cmd->add_option("--in", fuse_args.inputs, "Detection files")->required();
  fuse_cmd->add_option("--sigma", fuse_args.sigma)->capture_default_str();
  fuse_cmd->add_option("--metric", fuse_args.metric, "iou | is")->capture_default_str();
  fuse_cmd->add_option("--mode", fuse_args.mode, "select | merge")->capture_default_str();
  fuse_cmd->add_option("--scope", fuse_args.scope, "per-category | agnostic")->capture_default_str();
  fuse_cmd->add_option("--out", fuse_args.out)->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score detections against ground truth");
  eval_cmd->add_option("--gt", eval.gt, "GeoJSON ground truth")->required();
  eval_cmd->add_option("--dets", eval.dets, "Detection file")->required();
  eval_cmd->add_option("--iou-min", eval.iou_min)->capture_default_str();
  eval_cmd->add_flag("--inclusive", eval.inclusive, "Match at IoU >= iou-min instead of >");
  eval_cmd->add_flag("--eleven-point", eval.eleven_point, "11-point interpolated AP");
  eval_cmd->add_flag("--xview-type-ids", eval.xview_type_ids);
  eval_cmd->add_option("--report", eval.report, "JSON report path");

  AnalyzeArgs analyze;
  auto* analyze_cmd = app.add_subcommand("analyze", "Ground-truth statistics");
  analyze_cmd->add_option("--gt", analyze.gt, "GeoJSON ground truth")->required();
  analyze_cmd->add_option("--cooccurrence", analyze.cooccurrence, "Co-occurrence CSV");
  analyze_cmd->add_option("--graph", analyze.graph, "Spatial k-NN graph (DOT)");
  analyze_cmd->add_option("--histogram", analyze.histogram, "Size histogram CSV");
  analyze_cmd->add_option("--k", analyze.k, "Neighbours per object")->capture_default_str();
  analyze_cmd->add_flag("--xview-type-ids", analyze.xview_type_ids);

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate seeded synthetic scenes");
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count)->capture_default_str();
  synth_cmd->add_option("--width", synth.spec.width)->capture_default_str();
  synth_cmd->add_option("--height", synth.spec.height)->capture_default_str();
  synth_cmd->add_option("--objects", synth.spec.objects)->capture_default_str();
  synth_cmd->add_option("--seed", synth.spec.seed)->capture_default_str();
  synth_cmd->add_flag("--no-images", synth.no_images, "Write gt.geojson only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*plan_cmd) return run_plan(plan);
    if (*detect_cmd) return run_detect(run);
    if (*ensemble_cmd) return run_ensemble_command(run);
    if (*fuse_cmd) return run_fuse(fuse_args);
    if (*eval_cmd) return run_eval(eval);
    if (*analyze_cmd) return run_analyze(analyze);
    if (*synth_cmd) return run_synth(synth);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitUsage;
}
