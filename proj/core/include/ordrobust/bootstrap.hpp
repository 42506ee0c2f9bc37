#pragma once

#include "ordrobust/common.hpp"

#include <functional>

namespace ordrobust {

struct BootstrapCi {
  double lo = 0.0;
  double hi = 0.0;
  int n_boot = 0;
  int redraws = 0;  // failed replicates that were redrawn
};

/// Percentile (2.5/97.5) confidence bounds over with-replacement resamples.
/// `replicate` draws one resample with the supplied per-replicate RNG stream
/// and returns the statistic; a throw or NaN triggers a capped redraw.
/// Replicates run in parallel with pre-assigned seeds, so the result depends
/// only on (seed, n_boot).
BootstrapCi bootstrap_percentile_ci(int n_boot, std::uint64_t seed,
                                    const std::function<double(Rng&)>& replicate,
                                    int max_retries = 10);

}  // namespace ordrobust
