#include "ordrobust/grid.hpp"

#include <limits>

namespace ordrobust {

std::uint64_t simplex_grid_size(int k_categories, int resolution) {
  const int slots = k_categories - 1;
  if (slots < 1 || resolution < slots) return 0;
  // C(resolution - 1, slots - 1)
  std::uint64_t num = 1;
  const int r = slots - 1;
  for (int i = 1; i <= r; ++i) {
    num = num * static_cast<std::uint64_t>(resolution - 1 - r + i) / static_cast<std::uint64_t>(i);
  }
  return num;
}

namespace {

void recurse(Vec& w, int slot, int remaining, double step,
             const std::function<void(const Vec&)>& visit) {
  const int slots = static_cast<int>(w.size());
  if (slot == slots - 1) {
    w(slot) = remaining * step;
    visit(w);
    return;
  }
  const int left_for_rest = slots - 1 - slot;  // each later slot needs >= 1
  for (int m = 1; m <= remaining - left_for_rest; ++m) {
    w(slot) = m * step;
    recurse(w, slot + 1, remaining - m, step, visit);
  }
}

}  // namespace

void enumerate_simplex_grid(int k_categories, double range, int resolution,
                            const std::function<void(const Vec&)>& visit) {
  if (k_categories < 2) throw ValidationError("grid: K must be >= 2");
  if (k_categories > 6) throw ValidationError("grid: K > 6 exceeds the combinatorial guard");
  const int slots = k_categories - 1;
  if (resolution < slots) throw ValidationError("grid: resolution below K-1");
  Vec w(slots);
  recurse(w, 0, resolution, range / resolution, visit);
}

GridBest grid_oracle(int k_categories, double range, int resolution,
                     const std::function<double(const Vec&)>& objective, bool maximize) {
  GridBest best;
  best.value = maximize ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
  enumerate_simplex_grid(k_categories, range, resolution, [&](const Vec& w) {
    ++best.evaluated;
    const double v = objective(w);
    const bool better = maximize ? v > best.value : v < best.value;
    if (better) {
      best.value = v;
      best.w = w;
    }
  });
  return best;
}

}  // namespace ordrobust
