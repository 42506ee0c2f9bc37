#pragma once

#include "ordrobust/battery.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/reversal.hpp"

#include <optional>
#include <string>

namespace ordrobust {

/// Two-sided p-value of the focal coefficient under the relabeling w.
double p_value(const CoefficientKernel& kernel, const GapVector& gaps);

struct PBounds {
  double p_min = 0.0;
  double p_max = 1.0;
  GapVector arg_p_min;
  GapVector arg_p_max;
  double t2_max = 0.0;
  double t2_min = 0.0;
  bool degenerate = false;  // a zero-variance direction carries a nonzero coefficient
  bool converged = true;
};

/// Attainable p-value range over every feasible relabeling.
PBounds p_bounds(const CoefficientKernel& kernel, const ReversalOptions& options = {});

enum class CrossDirection { gain, lose };

struct Crossing {
  double threshold = 0.05;
  CrossDirection direction = CrossDirection::lose;
  CostValue min_cost;
  GapVector gaps;
};

struct SignificanceReport {
  std::string focal;
  double p_identity = 1.0;
  double p_min = 0.0;
  double p_max = 1.0;
  std::optional<Crossing> crossing;
  bool converged = true;
};

/// Minimal non-linearity cost at which the p-value crosses pi in the given
/// direction. gain: p drops below pi; lose: p rises above pi.
SignificanceReport min_cost_significance_reversal(const CoefficientKernel& kernel, double pi,
                                                  CrossDirection direction,
                                                  const ReversalOptions& options = {});

/// p extremes restricted to cost <= budget_c (used for budget curves).
struct BudgetedPBounds {
  double p_min = 0.0;
  double p_max = 1.0;
  bool converged = true;
};
BudgetedPBounds p_bounds_at_budget(const CoefficientKernel& kernel, double budget_c,
                                   const ReversalOptions& options = {},
                                   const std::vector<Vec>& warm_starts = {},
                                   Vec* arg_min_t2 = nullptr);

}  // namespace ordrobust
