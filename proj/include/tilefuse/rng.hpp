#pragma once

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace tilefuse {

std::uint64_t splitmix64(std::uint64_t x);
// Stable 64-bit FNV-1a, used to fold strings into RNG keys.
std::uint64_t fnv1a(std::string_view text);
std::uint64_t combine_keys(std::initializer_list<std::uint64_t> parts);

// Counter-based generator: draw i is a pure function of (key, i), so the
// stream for a tile does not depend on which worker runs it or when.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int uniform_int(int lo, int hi_inclusive);
  // Knuth's multiplication method; intended for small means.
  int poisson(double mean);

  void seek(std::uint64_t counter) { counter_ = counter; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tilefuse
