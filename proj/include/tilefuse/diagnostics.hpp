#pragma once

#include <mutex>
#include <string>
#include <vector>

namespace tilefuse {

// Thread-safe sink for warnings raised during a run. Messages are also
// echoed to stderr unless quiet.
class Diagnostics {
 public:
  explicit Diagnostics(bool echo = false) : echo_(echo) {}

  void warn(std::string message);
  std::size_t count() const;
  std::vector<std::string> messages() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> messages_;
  bool echo_;
};

}  // namespace tilefuse
