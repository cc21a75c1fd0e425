#include "tilefuse/pipeline.hpp"

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "tilefuse/error.hpp"
#include "tilefuse/tiling.hpp"

namespace tilefuse {
namespace {

// Bounds concurrent calls into one backend.
class CapacityGate {
 public:
  explicit CapacityGate(int capacity) : free_(capacity) {}

  void acquire() {
    if (free_ < 0) return;
    std::unique_lock lock(mutex_);
    cv_.wait(lock, [&] { return free_ > 0; });
    --free_;
  }
  void release() {
    if (free_ < 0) return;
    {
      std::lock_guard lock(mutex_);
      ++free_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int free_;  // negative: unbounded
};

template <typename Body>
void parallel_for(int workers, std::size_t n, Body&& body) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    int count = static_cast<int>(std::min<std::size_t>(n, std::size_t(workers)));
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

const BackendSpec* EnsembleConfig::find_backend(const std::string& name) const {
  for (const auto& b : backends) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

void EnsembleConfig::validate() const {
  if (pipelines.empty()) throw UsageError("ensemble needs at least one pipeline");
  try {
    fusion.validate();
    budget.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  for (const auto& p : pipelines) {
    const std::string where = "pipeline '" + p.name + "': ";
    if (!(p.confidence_threshold >= 0.0 && p.confidence_threshold <= 1.0)) {
      throw UsageError(where + "confidence_threshold must be in [0, 1]");
    }
    if (p.size_groups.empty()) throw UsageError(where + "size_groups must not be empty");
    const BackendSpec* b = find_backend(p.backend);
    if (!b) throw UsageError(where + "unknown backend '" + p.backend + "'");
    int min_tile = *std::min_element(b->tile_sizes.begin(), b->tile_sizes.end());
    if (p.overlap_px < 0 || p.overlap_px >= min_tile) {
      throw UsageError(where + "overlap_px " + std::to_string(p.overlap_px) +
                       " must be in [0, " + std::to_string(min_tile) +
                       ") for backend '" + b->name + "'");
    }
  }
}

ImageSource open_image(const std::filesystem::path& path) {
  auto info = read_image_info(path);
  return {path.stem().string(), path, info.width, info.height, nullptr};
}

PipelineResult run_pipeline(const ImageSource& image, const PipelineConfig& config,
                            DetectorBackend& backend, RunContext& ctx) {
  using Clock = std::chrono::steady_clock;
  const DetectorContract& contract = backend.contract();
  PipelineResult result;
  result.pipeline = config.name;

  // Decode on demand; the scaled image itself is never materialized.
  std::optional<Image> decoded;
  TrackedBytes decoded_bytes;
  const Image* pixels = image.pixels;
  if (contract.needs_pixels && !pixels) {
    decoded = read_image(image.path);
    decoded_bytes = TrackedBytes(ctx.memory, decoded->bytes());
    pixels = &*decoded;
  }

  const int scaled_w = scaled_extent(image.width, config.scale);
  const int scaled_h = scaled_extent(image.height, config.scale);
  CapacityGate gate(contract.capacity > 0 ? contract.capacity : -1);
  std::atomic<bool> stop{false};
  std::mutex status_mutex;
  std::atomic<std::size_t> tiles_run{0};
  std::atomic<long long> detector_ns{0};

  std::vector<Region> gathered;
  TrackedBytes gathered_bytes(ctx.memory, 0);

  // Multi-resolution backends run one pass per tile size, one after another.
  for (int tile_size : contract.tile_sizes) {
    if (stop.load()) break;
    TilePlan plan = plan_tiles(scaled_w, scaled_h, tile_size, config.overlap_px);
    result.tiles_planned += plan.tiles.size();
    std::vector<std::vector<Region>> slots(plan.tiles.size());
    std::vector<TrackedBytes> slot_bytes(plan.tiles.size());

    parallel_for(ctx.workers, plan.tiles.size(), [&](std::size_t i) {
      if (stop.load()) return;
      if (ctx.budget) {
        auto status = ctx.budget->check();
        if (status.exceeded) {
          std::lock_guard lock(status_mutex);
          if (!result.budget.exceeded) result.budget = status;
          stop.store(true);
          return;
        }
      }
      const TileSpec& tile = plan.tiles[i];
      std::optional<Image> tile_pixels;
      TrackedBytes tile_bytes;
      if (contract.needs_pixels) {
        tile_bytes = TrackedBytes(ctx.memory, std::size_t(tile.width) * tile.height * 3);
        tile_pixels = render_tile(*pixels, config.scale, tile);
      }
      TileRequest request{image.id, config.name, config.scale, tile,
                          tile_pixels ? &*tile_pixels : nullptr};

      gate.acquire();
      auto t0 = Clock::now();
      auto local = detect(backend, request, ctx.diagnostics);
      detector_ns += std::chrono::duration_cast<std::chrono::nanoseconds>(
                         Clock::now() - t0).count();
      gate.release();

      auto& slot = slots[i];
      slot.reserve(local.size());
      for (const auto& r : local) {
        Region scaled = tile_to_scaled(r, tile);
        auto box = clip(to_original(scaled.box, config.scale), image.width, image.height);
        if (!box) continue;
        slot.push_back({*box, r.category, r.confidence});
      }
      slot_bytes[i] = TrackedBytes(ctx.memory, slot.size() * sizeof(Region));
      tiles_run.fetch_add(1);
    });

    // Deterministic barrier: slots are concatenated in plan order.
    std::size_t total = gathered.size();
    for (const auto& s : slots) total += s.size();
    gathered_bytes.resize(total * sizeof(Region));
    gathered.reserve(total);
    for (auto& s : slots) gathered.insert(gathered.end(), s.begin(), s.end());
  }

  // The last tile may have finished exactly as the budget ran out.
  if (!result.budget.exceeded && ctx.budget) result.budget = ctx.budget->check();

  std::vector<Region> kept;
  kept.reserve(gathered.size());
  for (const auto& r : gathered) {
    if (r.confidence >= config.confidence_threshold) kept.push_back(r);
  }
  result.regions = filter_by_size_group(kept, config.size_groups);
  sort_canonical(result.regions);
  result.tiles_run = tiles_run.load();
  result.detector_seconds = double(detector_ns.load()) * 1e-9;
  return result;
}

EnsembleResult run_ensemble(const ImageSource& image, const EnsembleConfig& config,
                            const BackendRegistry& backends, RunContext& ctx) {
  EnsembleResult result;
  std::vector<Region> pooled;
  TrackedBytes pooled_bytes(ctx.memory, 0);

  // Decode once for every pipeline whose backend needs pixels.
  ImageSource source = image;
  std::optional<Image> decoded;
  TrackedBytes decoded_bytes;
  if (!source.pixels) {
    bool any = false;
    for (const auto& p : config.pipelines) {
      if (backends.contains(p.backend) && backends.get(p.backend).contract().needs_pixels) {
        any = true;
      }
    }
    if (any) {
      decoded = read_image(image.path);
      decoded_bytes = TrackedBytes(ctx.memory, decoded->bytes());
      source.pixels = &*decoded;
    }
  }

  for (const auto& p : config.pipelines) {
    try {
      auto r = run_pipeline(source, p, backends.get(p.backend), ctx);
      pooled.insert(pooled.end(), r.regions.begin(), r.regions.end());
      pooled_bytes.resize(pooled.size() * sizeof(Region));
      bool tripped = r.budget.exceeded;
      if (tripped) result.budget = r.budget;
      result.pipelines.push_back(std::move(r));
      if (tripped) break;
    } catch (const std::exception& e) {
      ++result.failed_pipelines;
      if (ctx.diagnostics) {
        ctx.diagnostics->warn("pipeline '" + p.name + "' failed on " + image.id +
                              ": " + e.what());
      }
    }
  }

  result.fused = fuse(pooled, config.fusion, ctx.diagnostics);
  return result;
}

}  // namespace tilefuse
