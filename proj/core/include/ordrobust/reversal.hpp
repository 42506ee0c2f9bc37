#pragma once

#include "ordrobust/battery.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/qp.hpp"

#include <optional>
#include <string>

namespace ordrobust {

/// Options shared by the reversal-family optimizations.
struct ReversalOptions {
  double alpha = 2.0;
  std::optional<double> epsilon_gap;  // default: 1e-6 * L / (K-1)
  BandThresholds bands;
};

struct ReversalReport {
  std::string focal;
  bool reversible = false;
  std::optional<CostValue> min_cost;
  std::optional<GapVector> argmin_gaps;
  double beta_at_identity = 0.0;
  double kkt_residual = 0.0;
  bool at_cost_limit = false;  // boundary infeasible within the gap floor
};

/// Prop.-1 test: mixed signs among the per-cut coefficients (near-zero cuts
/// are sign-free).
bool check_reversibility(const DichotomizedBattery& battery, const std::string& focal);

ReversalReport min_cost_sign_reversal(const DichotomizedBattery& battery,
                                      const std::string& focal,
                                      const ReversalOptions& options = {});

struct RangeAtBudget {
  double lo = 0.0;
  double hi = 0.0;
  GapVector arg_lo;
  GapVector arg_hi;
};

/// Extremes of beta_m(w) over relabelings with cost at most budget_c.
RangeAtBudget beta_range_at_budget(const DichotomizedBattery& battery, const std::string& focal,
                                   double budget_c, const ReversalOptions& options = {});

struct RatioBounds {
  std::string numerator;
  std::string denominator;
  bool bounded = false;
  double lo = 0.0;  // open bounds, approached but not attained
  double hi = 0.0;
  Vec per_cut_ratios;
  bool near_unbounded = false;  // a denominator cut sits at numerical zero
};

RatioBounds ratio_bounds(const DichotomizedBattery& battery, const std::string& numerator,
                         const std::string& denominator);

struct TargetRatioResult {
  CostValue cost;
  GapVector gaps;
  double kkt_residual = 0.0;
};

TargetRatioResult min_cost_target_ratio(const DichotomizedBattery& battery,
                                        const std::string& numerator,
                                        const std::string& denominator, double rho,
                                        const ReversalOptions& options = {});

/// Attainable ratio range at a cost budget (Dinkelbach on the linear
/// fractional objective; requires a non-reversible denominator).
RangeAtBudget ratio_range_at_budget(const DichotomizedBattery& battery,
                                    const std::string& numerator,
                                    const std::string& denominator, double budget_c,
                                    const ReversalOptions& options = {});

}  // namespace ordrobust
