#pragma once

#include "ordrobust/common.hpp"

#include <cstdint>
#include <functional>

namespace ordrobust {

/// Lattice point count C(resolution-1, K-2) for the simplex grid.
std::uint64_t simplex_grid_size(int k_categories, int resolution);

/// Visits every gap vector w = m * (range/resolution) with integer m_k >= 1 and
/// sum m = resolution, in lexicographic order.
void enumerate_simplex_grid(int k_categories, double range, int resolution,
                            const std::function<void(const Vec&)>& visit);

struct GridBest {
  Vec w;
  double value = 0.0;
  std::uint64_t evaluated = 0;
};

/// Exhaustive optimization over the lattice. K is capped at 6 (combinatorial
/// guard). Ties keep the lexicographically first point.
GridBest grid_oracle(int k_categories, double range, int resolution,
                     const std::function<double(const Vec&)>& objective,
                     bool maximize = false);

}  // namespace ordrobust
