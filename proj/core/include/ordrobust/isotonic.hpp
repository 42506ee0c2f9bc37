#pragma once

#include "ordrobust/common.hpp"

namespace ordrobust {

/// Weighted pool-adjacent-violators: nondecreasing least-squares fit.
/// Idempotent and order-preserving.
Vec pav_nondecreasing(const Vec& values, const Vec& weights = Vec());

}  // namespace ordrobust
