#pragma once

#include <chrono>
#include <cstdint>
#include <string_view>

#include "tilefuse/memory.hpp"

namespace tilefuse {

struct BudgetConfig {
  double per_image_seconds = 2400.0;     // one image, all pipelines
  double total_seconds = 259200.0;       // whole run
  std::uint64_t memory_bytes = 8ULL << 30;

  void validate() const;
};

enum class BudgetKind { PerImageTime, TotalTime, Memory };
std::string_view to_string(BudgetKind kind);

struct BudgetSnapshot {
  double image_seconds = 0.0;
  double total_seconds = 0.0;
  std::uint64_t peak_bytes = 0;
};

struct BudgetStatus {
  bool exceeded = false;
  BudgetKind kind = BudgetKind::PerImageTime;

  static BudgetStatus ok() { return {}; }
  static BudgetStatus tripped(BudgetKind k) { return {true, k}; }
};

// Time limits trip once elapsed reaches the limit; memory trips when the
// tracked peak goes above it. Checked in that order.
BudgetStatus check_budget(const BudgetConfig& config, const BudgetSnapshot& s);

// Wall clock for the run and the current image, plus the tracked memory peak.
class BudgetMonitor {
 public:
  using Clock = std::chrono::steady_clock;

  BudgetMonitor(BudgetConfig config, const MemoryTracker* tracker);

  void start_image();
  BudgetSnapshot snapshot() const;
  BudgetStatus check() const { return check_budget(config_, snapshot()); }
  const BudgetConfig& config() const { return config_; }

 private:
  BudgetConfig config_;
  const MemoryTracker* tracker_;
  Clock::time_point run_start_;
  Clock::time_point image_start_;
};

}  // namespace tilefuse
