#include "tilefuse/memory.hpp"

#include <utility>

namespace tilefuse {

void MemoryTracker::acquire(std::size_t bytes) {
  std::size_t now = current_.fetch_add(bytes) + bytes;
  std::size_t prev = peak_.load();
  while (now > prev && !peak_.compare_exchange_weak(prev, now)) {
  }
}

void MemoryTracker::release(std::size_t bytes) { current_.fetch_sub(bytes); }

TrackedBytes::TrackedBytes(MemoryTracker* tracker, std::size_t bytes)
    : tracker_(tracker), bytes_(bytes) {
  if (tracker_) tracker_->acquire(bytes_);
}

TrackedBytes::TrackedBytes(TrackedBytes&& other) noexcept
    : tracker_(other.tracker_), bytes_(other.bytes_) {
  other.tracker_ = nullptr;
  other.bytes_ = 0;
}

TrackedBytes& TrackedBytes::operator=(TrackedBytes&& other) noexcept {
  if (this != &other) {
    if (tracker_) tracker_->release(bytes_);
    tracker_ = std::exchange(other.tracker_, nullptr);
    bytes_ = std::exchange(other.bytes_, 0);
  }
  return *this;
}

TrackedBytes::~TrackedBytes() {
  if (tracker_) tracker_->release(bytes_);
}

void TrackedBytes::resize(std::size_t bytes) {
  if (!tracker_) {
    bytes_ = bytes;
    return;
  }
  if (bytes > bytes_) tracker_->acquire(bytes - bytes_);
  else tracker_->release(bytes_ - bytes);
  bytes_ = bytes;
}

}  // namespace tilefuse
