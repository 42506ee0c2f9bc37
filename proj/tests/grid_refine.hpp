// Test-only refinement of the exhaustive simplex-grid oracle: a coarse pass
// followed by fixed-step lattice hill-climbs at geometrically finer steps.
// Candidates snap to the gap floor, and an optional variance budget is
// honored by exact radial projection toward the zero-variance center, which
// lets the walk slide along the curved budget boundary. Pure enumeration and
// closed-form arithmetic throughout; never touches the solver under test.
#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/grid.hpp"

#include <functional>
#include <limits>

namespace gridrefine {

using ordrobust::Mat;
using ordrobust::Vec;

struct Best {
  Vec w;
  double value = 0.0;
};

struct Budget {
  Mat p;       // PSD variance form
  double rhs;  // w'Pw <= rhs
};

namespace detail {

inline Vec project_budget(const Vec& w, const Budget& budget, const Vec& center) {
  const Vec d = w - center;
  const double var = d.dot(budget.p * d);
  if (var <= budget.rhs) return w;
  const double theta = std::sqrt(std::max(0.0, budget.rhs) / var);
  return center + theta * d;
}

template <class F>
void local_lattice(const Vec& center, double floor, double step, int halfwidth,
                   const F& visit) {
  const int n = static_cast<int>(center.size());
  Vec w = center;
  // Free choices on the first n-1 coordinates (snapped to the floor), the
  // last takes the remainder so the sum is preserved.
  std::function<void(int, double)> rec = [&](int dim, double used) {
    if (dim == n - 1) {
      const double last = center(dim) - used;
      if (last < floor) return;
      w(dim) = last;
      visit(w);
      return;
    }
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int off = -halfwidth; off <= halfwidth; ++off) {
      const double v = std::max(floor, center(dim) + off * step);
      if (v == prev) continue;  // clamped duplicates
      prev = v;
      w(dim) = v;
      rec(dim + 1, used + (v - center(dim)));
    }
  };
  rec(0, 0.0);
}

}  // namespace detail

/// objective returns the value to extremize, or NaN for infeasible points.
template <class F>
Best refined_oracle(int k_categories, double range, int coarse_resolution, const F& objective,
                    bool maximize, const Budget* budget = nullptr, int rounds = 9,
                    int halfwidth = 6) {
  const double sign = maximize ? -1.0 : 1.0;
  const Vec slice_center = Vec::Constant(k_categories - 1, range / (k_categories - 1));

  Best best;
  best.value = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vec& w_raw) {
    const Vec w = budget ? detail::project_budget(w_raw, *budget, slice_center) : w_raw;
    const double v = objective(w);
    if (!std::isfinite(v)) return;
    if (sign * v < best.value) {
      best.value = sign * v;
      best.w = w;
    }
  };

  ordrobust::enumerate_simplex_grid(k_categories, range, coarse_resolution, consider);
  if (!std::isfinite(best.value) || best.w.size() == 0) {
    best.value = std::numeric_limits<double>::quiet_NaN();
    return best;
  }

  const int n = k_categories - 1;
  const double coarse_step = range / coarse_resolution;
  const double floor = 1e-9 * range / n;

  // Seeds: the coarse winner plus every near-vertex corner; a quasiconcave
  // extremum can sit in a different single-jump basin than the coarse best.
  std::vector<Vec> seeds;
  seeds.push_back(best.w);
  for (int j = 0; j < n; ++j) {
    Vec corner = Vec::Constant(n, coarse_step);
    corner(j) = range - (n - 1) * coarse_step;
    seeds.push_back(corner);
  }

  Best overall = best;
  overall.value = std::numeric_limits<double>::infinity();
  for (const Vec& seed : seeds) {
    best.w = seed;
    {
      const double v = [&] {
        const Vec w = budget ? detail::project_budget(seed, *budget, slice_center) : seed;
        return objective(w);
      }();
      if (!std::isfinite(v)) continue;
      best.value = sign * v;
    }
    double step = coarse_step;
    for (int round = 0; round < rounds; ++round) {
      // plateau walk: keep stepping at this resolution while it helps
      for (int walk = 0; walk < 200; ++walk) {
        const double before = best.value;
        const Vec center = best.w;  // the visitor mutates best.w mid-enumeration
        detail::local_lattice(center, floor, step, halfwidth, consider);
        if (best.value >= before - 1e-15 * (1.0 + std::fabs(before))) break;
      }
      step /= 3.0;
    }
    if (best.value < overall.value) overall = best;
  }
  overall.value *= sign;
  return overall;
}

}  // namespace gridrefine
