#include "ordrobust/inference.hpp"

#include "ordrobust/fractional.hpp"
#include "ordrobust/mathutil.hpp"

#include <algorithm>
#include <cmath>

namespace ordrobust {

namespace {

TsqProblem make_problem(const CoefficientKernel& kernel, const ReversalOptions& options) {
  TsqProblem pr;
  pr.b = kernel.b_eff;
  pr.v = kernel.v_eff;
  const double eps = options.epsilon_gap
                         ? *options.epsilon_gap
                         : default_epsilon_gap(kernel.k_categories, kernel.range_value);
  pr.polytope = gap_polytope(kernel.range_value, kernel.effective.floor_for(eps));
  const Mat p_full = cost_matrix(kernel.k_categories);
  pr.p_cost = kernel.effective.expand.transpose() * p_full * kernel.effective.expand;
  return pr;
}

GapVector expand_gaps(const CoefficientKernel& kernel, const Vec& w_eff) {
  GapVector g;
  g.w = kernel.effective.expand_gaps(w_eff);
  g.range = kernel.range_value;
  return g;
}

double p_of_t2(double t2, double dof) {
  if (std::isinf(t2)) return 0.0;
  return student_t_two_sided_p(std::sqrt(std::max(0.0, t2)), dof);
}

}  // namespace

double p_value(const CoefficientKernel& kernel, const GapVector& gaps) {
  const double var = kernel.variance(gaps);
  if (var <= 0.0) throw NumericError("p_value: degenerate variance under this relabeling");
  const double t = kernel.beta(gaps) / std::sqrt(var);
  return student_t_two_sided_p(t, kernel.dof_t);
}

PBounds p_bounds(const CoefficientKernel& kernel, const ReversalOptions& options) {
  const TsqProblem pr = make_problem(kernel, options);

  PBounds out;
  TsqResult hi = max_t2(pr);
  TsqResult lo = min_t2(pr);
  out.t2_max = hi.t2;
  out.t2_min = lo.t2;
  out.degenerate = hi.degenerate;
  out.converged = hi.converged && lo.converged;
  out.p_min = p_of_t2(hi.t2, kernel.dof_t);
  out.p_max = p_of_t2(lo.t2, kernel.dof_t);
  out.arg_p_min = expand_gaps(kernel, hi.w);
  out.arg_p_max = expand_gaps(kernel, lo.w);
  return out;
}

BudgetedPBounds p_bounds_at_budget(const CoefficientKernel& kernel, double budget_c,
                                   const ReversalOptions& options,
                                   const std::vector<Vec>& warm_starts, Vec* arg_min_t2) {
  const TsqProblem pr = make_problem(kernel, options);
  const double max_var_value = max_var(kernel.k_categories, kernel.range_value);
  const double var_budget = max_var_value * std::pow(std::clamp(budget_c, 0.0, 1.0),
                                                     options.alpha);
  BudgetedPBounds out;
  TsqResult hi = max_t2(pr, var_budget);
  TsqResult lo = min_t2(pr, var_budget, warm_starts);
  out.p_min = p_of_t2(hi.t2, kernel.dof_t);
  out.p_max = p_of_t2(lo.t2, kernel.dof_t);
  out.converged = hi.converged && lo.converged;
  if (arg_min_t2) *arg_min_t2 = lo.w;
  return out;
}

SignificanceReport min_cost_significance_reversal(const CoefficientKernel& kernel, double pi,
                                                  CrossDirection direction,
                                                  const ReversalOptions& options) {
  if (!(pi > 0.0 && pi < 1.0))
    throw ValidationError("significance threshold must lie strictly inside (0, 1)");

  SignificanceReport report;
  report.focal = kernel.name;
  report.p_identity = p_value(kernel, kernel.identity_gaps());

  const PBounds bounds = p_bounds(kernel, options);
  report.p_min = bounds.p_min;
  report.p_max = bounds.p_max;
  report.converged = bounds.converged;

  const TsqProblem pr = make_problem(kernel, options);
  const double max_var_value = max_var(kernel.k_categories, kernel.range_value);

  auto finish = [&](double var, const Vec& w_eff) {
    Crossing cross;
    cross.threshold = pi;
    cross.direction = direction;
    CostValue cv;
    cv.alpha = options.alpha;
    cv.c = max_var_value > 0.0
               ? std::pow(std::clamp(var / max_var_value, 0.0, 1.0), 1.0 / options.alpha)
               : 0.0;
    cv.band = band_for(cv.c, options.bands);
    cross.min_cost = cv;
    cross.gaps = expand_gaps(kernel, w_eff);
    report.crossing = cross;
  };

  if (direction == CrossDirection::gain) {
    // Need p <= pi somewhere: pi must lie between p_min and p_identity.
    if (!(pi > report.p_min && pi < report.p_identity)) {
      if (report.p_identity <= pi) {  // already significant at identity
        finish(0.0, pr.polytope.center());
      }
      return report;
    }
    // Invert the threshold into a t^2 target and take the exact minimal-cost
    // relabeling that attains it.
    double t_lo = 0.0;
    double t_hi = std::isfinite(bounds.t2_max) ? std::sqrt(std::max(bounds.t2_max, 1.0)) : 1.0;
    while (p_of_t2(t_hi * t_hi, kernel.dof_t) > pi) t_hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (t_lo + t_hi);
      if (p_of_t2(mid * mid, kernel.dof_t) > pi) {
        t_lo = mid;
      } else {
        t_hi = mid;
      }
    }
    const double tau = t_hi * t_hi;
    auto res = min_variance_for_t2(pr, tau);
    if (!res) return report;  // tau unattainable within tolerance
    finish(res->w.dot(pr.p_cost * res->w), res->w);
    return report;
  }

  // lose: need p >= pi somewhere above the identity p-value.
  if (!(pi < report.p_max && pi > report.p_identity)) {
    if (report.p_identity >= pi) finish(0.0, pr.polytope.center());
    return report;
  }
  // Bisection on the cost budget; the inner problem maximizes p at the budget.
  double c_lo = 0.0;
  double c_hi = 1.0;
  Vec warm;
  std::vector<Vec> warm_starts;
  Vec best_arg = pr.polytope.center();
  bool have_best = false;
  for (int it = 0; it < 20; ++it) {
    const double c_mid = 0.5 * (c_lo + c_hi);
    Vec arg;
    BudgetedPBounds pb = p_bounds_at_budget(kernel, c_mid, options, warm_starts, &arg);
    report.converged = report.converged && pb.converged;
    if (pb.p_max >= pi) {
      c_hi = c_mid;
      best_arg = arg;
      have_best = true;
    } else {
      c_lo = c_mid;
    }
    warm_starts.assign(1, arg);
    if (c_hi - c_lo <= 1e-4) break;
  }
  if (!have_best) {
    Vec arg;
    BudgetedPBounds pb = p_bounds_at_budget(kernel, 1.0, options, warm_starts, &arg);
    if (pb.p_max < pi) return report;  // numerically unattainable
    best_arg = arg;
    c_hi = 1.0;
  }
  finish(max_var_value * std::pow(c_hi, options.alpha), best_arg);
  return report;
}

}  // namespace ordrobust
