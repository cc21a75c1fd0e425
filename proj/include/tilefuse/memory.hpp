#pragma once

#include <atomic>
#include <cstddef>

namespace tilefuse {

// Tracks the bytes held by large run-time buffers (decoded images, tile
// pixels, region lists) and their high-water mark.
class MemoryTracker {
 public:
  void acquire(std::size_t bytes);
  void release(std::size_t bytes);

  std::size_t current() const { return current_.load(); }
  std::size_t peak() const { return peak_.load(); }
  void reset_peak() { peak_.store(current_.load()); }

 private:
  std::atomic<std::size_t> current_{0};
  std::atomic<std::size_t> peak_{0};
};

// RAII hold on tracked bytes. A null tracker makes it a no-op.
class TrackedBytes {
 public:
  TrackedBytes() = default;
  TrackedBytes(MemoryTracker* tracker, std::size_t bytes);
  TrackedBytes(TrackedBytes&& other) noexcept;
  TrackedBytes& operator=(TrackedBytes&& other) noexcept;
  TrackedBytes(const TrackedBytes&) = delete;
  TrackedBytes& operator=(const TrackedBytes&) = delete;
  ~TrackedBytes();

  std::size_t bytes() const { return bytes_; }
  void resize(std::size_t bytes);

 private:
  MemoryTracker* tracker_ = nullptr;
  std::size_t bytes_ = 0;
};

}  // namespace tilefuse
