#include "tilefuse/budget.hpp"

#include <stdexcept>

namespace tilefuse {

void BudgetConfig::validate() const {
  if (!(per_image_seconds > 0.0)) throw std::invalid_argument("per-image time limit must be positive");
  if (!(total_seconds > 0.0)) throw std::invalid_argument("total time limit must be positive");
  if (memory_bytes == 0) throw std::invalid_argument("memory limit must be positive");
}

std::string_view to_string(BudgetKind kind) {
  switch (kind) {
    case BudgetKind::PerImageTime: return "per-image-time";
    case BudgetKind::TotalTime: return "total-time";
    case BudgetKind::Memory: return "memory";
  }
  return "?";
}

BudgetStatus check_budget(const BudgetConfig& config, const BudgetSnapshot& s) {
  if (s.image_seconds >= config.per_image_seconds) {
    return BudgetStatus::tripped(BudgetKind::PerImageTime);
  }
  if (s.total_seconds >= config.total_seconds) {
    return BudgetStatus::tripped(BudgetKind::TotalTime);
  }
  if (s.peak_bytes > config.memory_bytes) {
    return BudgetStatus::tripped(BudgetKind::Memory);
  }
  return BudgetStatus::ok();
}

BudgetMonitor::BudgetMonitor(BudgetConfig config, const MemoryTracker* tracker)
    : config_(config),
      tracker_(tracker),
      run_start_(Clock::now()),
      image_start_(run_start_) {}

void BudgetMonitor::start_image() { image_start_ = Clock::now(); }

BudgetSnapshot BudgetMonitor::snapshot() const {
  auto now = Clock::now();
  std::chrono::duration<double> image = now - image_start_;
  std::chrono::duration<double> total = now - run_start_;
  return {image.count(), total.count(), tracker_ ? tracker_->peak() : 0};
}

}  // namespace tilefuse
