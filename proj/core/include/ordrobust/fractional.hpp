#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/qp.hpp"

#include <optional>
#include <vector>

namespace ordrobust {

/// Extremization of t^2(w) = (b.w)^2 / (w'Vw) over the gap polytope, with an
/// optional variance budget w'P w <= var_budget. Everything operates in the
/// deduped (effective) gap space.
struct TsqProblem {
  Vec b;
  Mat v;
  GapPolytope polytope;
  Mat p_cost;  // quadratic form of the non-linearity cost
};

struct TsqResult {
  Vec w;
  double t2 = 0.0;
  bool degenerate = false;  // variance vanishes where the coefficient does not
  bool converged = true;
  int iterations = 0;
};

/// Relative zero threshold for classifying cut-coefficient signs.
double sign_tolerance(const Vec& b);
bool signs_mixed(const Vec& b, double tol);

/// Minimal gap variance on the sign boundary b.w = 0 (nullopt when the
/// boundary is infeasible on this polytope).
std::optional<QpResult> min_variance_on_boundary(const Vec& b, const Mat& p_cost,
                                                 const GapPolytope& polytope);

/// Global maximum of t^2. Exact: per sign branch the problem cones down to a
/// convex QP; a variance budget enters as a second-order-cone handled by
/// supporting-hyperplane cuts.
TsqResult max_t2(const TsqProblem& problem, std::optional<double> var_budget = std::nullopt);

/// Global minimum of t^2 without a budget (sign boundary or vertex
/// enumeration, both exact). With a budget the boundary case stays exact and
/// the interior case runs the multi-start Dinkelbach descent.
TsqResult min_t2(const TsqProblem& problem, std::optional<double> var_budget = std::nullopt,
                 const std::vector<Vec>& warm_starts = {});

/// Smallest gap variance for which |t| >= sqrt(tau) is attainable; exact via
/// supporting-hyperplane cuts on the branch cones. Returns nullopt when tau
/// exceeds the attainable maximum.
std::optional<QpResult> min_variance_for_t2(const TsqProblem& problem, double tau);

/// Multi-start Dinkelbach iteration for the quadratic ratio (b.w)^2 / (w'Vw);
/// the spec'd general-purpose maximizer (set maximize = false for descent).
struct DinkelbachResult {
  Vec w;
  double ratio = 0.0;
  int iterations = 0;
  bool converged = true;
};
DinkelbachResult dinkelbach_max_ratio(const TsqProblem& problem,
                                      std::optional<double> var_budget = std::nullopt,
                                      bool maximize = true,
                                      const std::vector<Vec>& warm_starts = {});

}  // namespace ordrobust
