#include "tilefuse/diagnostics.hpp"

#include <algorithm>
#include <iostream>


namespace tilefuse {

void Diagnostics::warn(std::string message) {
  std::lock_guard lock(mutex_);
  if (echo_) std::cerr << "warning: " << message << '\n';
  messages_.push_back(std::move(message));
}

std::size_t Diagnostics::count() const {
  std::lock_guard lock(mutex_);
  return messages_.size();
}

std::vector<std::string> Diagnostics::messages() const {
  std::lock_guard lock(mutex_);
  return messages_;
}

}  // namespace tilefuse
