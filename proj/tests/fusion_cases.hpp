#pragma once

#include <random>
#include <vector>

#include "tilefuse/geometry.hpp"

namespace tilefuse::testing {

// Clustered random regions: boxes drawn around a few centers so that groups
// of every size occur, confidences on a coarse grid so ties occur too.
inline std::vector<Region> random_instance(std::mt19937_64& rng, int max_n = 64) {
  std::uniform_int_distribution<int> count(0, max_n);
  std::uniform_real_distribution<double> center(0, 200), jitter(-15, 15), side(5, 40);
  std::uniform_int_distribution<int> category(1, 3), conf_step(0, 20);
  const int n = count(rng);
  std::vector<double> cx(4), cy(4);
  for (int k = 0; k < 4; ++k) {
    cx[k] = center(rng);
    cy[k] = center(rng);
  }
  std::vector<Region> rs;
  for (int i = 0; i < n; ++i) {
    int k = i % 4;
    double x = cx[k] + jitter(rng), y = cy[k] + jitter(rng);
    rs.push_back({{x, y, x + side(rng), y + side(rng)}, category(rng), conf_step(rng) / 20.0});
  }
  return rs;
}

}  // namespace tilefuse::testing
