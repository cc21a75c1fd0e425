#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "tilefuse/dataset.hpp"
#include "tilefuse/detector.hpp"
#include "tilefuse/synthetic_detector.hpp"

namespace tilefuse {

enum class BackendKind { Synthetic, External };

// Declarative description of a detector backend, as read from the config.
struct BackendSpec {
  std::string name;
  BackendKind kind = BackendKind::Synthetic;
  std::vector<int> tile_sizes{300};
  int capacity = 0;
  SyntheticDetectorParams synthetic;  // kind == Synthetic
  std::string command;                // kind == External
  double timeout_seconds = 60.0;      // kind == External
};

inline constexpr const char* kSingleResolutionBackend = "vanilla-sr";
inline constexpr const char* kMultiResolutionBackend = "multires-mr";

// "vanilla-sr" (300 px tiles) and "multires-mr" (300, 400 and 500 px
// passes), both as noise-free synthetic backends.
std::vector<BackendSpec> builtin_backend_specs();

class BackendRegistry {
 public:
  void add(std::unique_ptr<DetectorBackend> backend);
  // Throws UsageError naming the backend when it is not registered.
  DetectorBackend& get(const std::string& name) const;
  bool contains(const std::string& name) const { return backends_.contains(name); }

 private:
  std::map<std::string, std::unique_ptr<DetectorBackend>> backends_;
};

// Synthetic backends read `truth` (which must outlive the registry) and
// derive their seed from `run_seed` and their configured seed.
BackendRegistry make_backends(std::span<const BackendSpec> specs,
                              const GroundTruthSet* truth,
                              std::uint64_t run_seed);

}  // namespace tilefuse
