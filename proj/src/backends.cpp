#include "tilefuse/backends.hpp"

#include <chrono>

#include "tilefuse/error.hpp"
#include "tilefuse/external_detector.hpp"
#include "tilefuse/rng.hpp"

namespace tilefuse {

std::vector<BackendSpec> builtin_backend_specs() {
  BackendSpec sr;
  sr.name = kSingleResolutionBackend;
  sr.tile_sizes = {300};
  BackendSpec mr;
  mr.name = kMultiResolutionBackend;
  mr.tile_sizes = {300, 400, 500};
  return {sr, mr};
}

void BackendRegistry::add(std::unique_ptr<DetectorBackend> backend) {
  auto name = backend->contract().name;
  backends_[name] = std::move(backend);
}

DetectorBackend& BackendRegistry::get(const std::string& name) const {
  auto it = backends_.find(name);
  if (it == backends_.end()) throw UsageError("unknown backend '" + name + "'");
  return *it->second;
}

BackendRegistry make_backends(std::span<const BackendSpec> specs,
                              const GroundTruthSet* truth,
                              std::uint64_t run_seed) {
  BackendRegistry registry;
  for (const auto& spec : specs) {
    DetectorContract contract{spec.name, spec.tile_sizes, spec.capacity, false};
    if (spec.kind == BackendKind::Synthetic) {
      auto params = spec.synthetic;
      params.seed = combine_keys({run_seed, params.seed});
      registry.add(std::make_unique<SyntheticDetector>(contract, params, truth));
    } else {
      auto timeout = std::chrono::milliseconds(
          static_cast<long long>(spec.timeout_seconds * 1000.0));
      registry.add(std::make_unique<ExternalProcessDetector>(contract, spec.command, timeout));
    }
  }
  return registry;
}

}  // namespace tilefuse
