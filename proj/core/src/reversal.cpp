#include "ordrobust/reversal.hpp"

#include "ordrobust/fractional.hpp"

#include <algorithm>
#include <cmath>

namespace ordrobust {

namespace {

struct EffectiveSpace {
  GapPolytope polytope;
  Mat p_cost;        // effective-space cost quadratic
  double max_var;    // maxVar(K, L) in the full gap space
  EffectiveCuts cuts;
  int k_categories;
  double range;
};

EffectiveSpace effective_space(const DichotomizedBattery& battery,
                               const ReversalOptions& options) {
  EffectiveSpace sp;
  sp.cuts = battery.effective;
  sp.k_categories = battery.k_categories;
  sp.range = battery.range();
  const double eps = options.epsilon_gap
                         ? *options.epsilon_gap
                         : default_epsilon_gap(battery.k_categories, sp.range);
  sp.polytope = gap_polytope(sp.range, sp.cuts.floor_for(eps));
  const Mat p_full = cost_matrix(battery.k_categories);
  sp.p_cost = sp.cuts.expand.transpose() * p_full * sp.cuts.expand;
  sp.max_var = max_var(battery.k_categories, sp.range);
  return sp;
}

CostValue cost_from_var(double var, double max_var_value, double alpha,
                        const BandThresholds& bands) {
  CostValue cv;
  cv.alpha = alpha;
  if (max_var_value <= 0.0) {
    cv.c = 0.0;
    cv.degenerate = true;
  } else {
    cv.c = std::pow(std::clamp(var / max_var_value, 0.0, 1.0), 1.0 / alpha);
  }
  cv.band = band_for(cv.c, bands);
  return cv;
}

GapVector expand_gaps(const EffectiveSpace& sp, const Vec& w_eff) {
  GapVector g;
  g.w = sp.cuts.expand_gaps(w_eff);
  g.range = sp.range;
  return g;
}

}  // namespace

bool check_reversibility(const DichotomizedBattery& battery, const std::string& focal) {
  if (battery.k_categories == 2) return false;  // a single cut can never mix signs
  const Vec b = battery.cut_coefficients(focal);
  return signs_mixed(b, sign_tolerance(b));
}

ReversalReport min_cost_sign_reversal(const DichotomizedBattery& battery,
                                      const std::string& focal,
                                      const ReversalOptions& options) {
  ReversalReport report;
  report.focal = focal;
  report.beta_at_identity = recompose_beta(battery, battery.identity_gaps(), focal);
  report.reversible = check_reversibility(battery, focal);
  if (!report.reversible) return report;

  const EffectiveSpace sp = effective_space(battery, options);
  const Vec b_eff = -battery.cut_coefficients(focal);  // beta(w) = b.w

  auto boundary = min_variance_on_boundary(b_eff, sp.p_cost, sp.polytope);
  if (!boundary) {
    // Mixed signs but no straddling vertex within the gap floor: the reversal
    // exists only in the single-jump limit.
    report.at_cost_limit = true;
    CostValue cv;
    cv.alpha = options.alpha;
    cv.c = 1.0;
    cv.band = band_for(1.0, options.bands);
    report.min_cost = cv;
    return report;
  }
  const double var = boundary->w.dot(sp.p_cost * boundary->w);
  report.min_cost = cost_from_var(var, sp.max_var, options.alpha, options.bands);
  report.argmin_gaps = expand_gaps(sp, boundary->w);
  report.kkt_residual = boundary->kkt_residual;
  return report;
}

RangeAtBudget beta_range_at_budget(const DichotomizedBattery& battery, const std::string& focal,
                                   double budget_c, const ReversalOptions& options) {
  if (budget_c < 0.0 || budget_c > 1.0)
    throw ValidationError("cost budget must lie in [0, 1]");
  const EffectiveSpace sp = effective_space(battery, options);
  const Vec b_eff = -battery.cut_coefficients(focal);
  const double var_budget = sp.max_var * std::pow(budget_c, options.alpha);

  RangeAtBudget out;
  const Vec center = sp.polytope.center();

  auto solve_side = [&](bool maximize) -> std::pair<double, Vec> {
    // Unconstrained-by-budget extreme first (closed form on the polytope).
    const LinearExtreme ext = extremize_linear(b_eff, sp.polytope, maximize);
    const double ext_var = ext.w.dot(sp.p_cost * ext.w);
    if (ext_var <= var_budget * (1.0 + 1e-12) + 1e-13) return {ext.value, ext.w};
    if (var_budget <= 1e-13 * sp.max_var) {
      // Only (effectively) equal gaps are feasible at zero budget.
      return {b_eff.dot(center), center};
    }
    QpProblem qp;
    const int n = sp.polytope.dim();
    qp.q = Mat::Zero(n, n);
    qp.lin = maximize ? Vec(-b_eff) : b_eff;
    sp.polytope.append_to(qp);
    auto res = solve_qp_budget(qp, sp.p_cost, var_budget, center);
    if (!res) throw NumericError("beta_range_at_budget: budget subproblem infeasible");
    const double value = b_eff.dot(res->w);
    return {value, res->w};
  };

  auto [lo, arg_lo] = solve_side(false);
  auto [hi, arg_hi] = solve_side(true);
  out.lo = lo;
  out.hi = hi;
  out.arg_lo = expand_gaps(sp, arg_lo);
  out.arg_hi = expand_gaps(sp, arg_hi);
  return out;
}

RatioBounds ratio_bounds(const DichotomizedBattery& battery, const std::string& numerator,
                         const std::string& denominator) {
  RatioBounds out;
  out.numerator = numerator;
  out.denominator = denominator;

  const Vec bm = battery.cut_coefficients(numerator);
  const Vec bn = battery.cut_coefficients(denominator);
  out.bounded = !check_reversibility(battery, denominator);

  const double tol = sign_tolerance(bn);
  std::vector<double> ratios;
  for (int k = 0; k < bn.size(); ++k) {
    if (std::fabs(bn(k)) < tol) {
      if (std::fabs(bm(k)) >= sign_tolerance(bm)) out.near_unbounded = true;
      continue;
    }
    ratios.push_back(bm(k) / bn(k));
  }
  out.per_cut_ratios = Eigen::Map<Vec>(ratios.data(), static_cast<int>(ratios.size()));
  if (!out.bounded) return out;
  if (ratios.empty()) {
    out.near_unbounded = true;
    out.bounded = false;
    return out;
  }
  out.lo = *std::min_element(ratios.begin(), ratios.end());
  out.hi = *std::max_element(ratios.begin(), ratios.end());
  return out;
}

TargetRatioResult min_cost_target_ratio(const DichotomizedBattery& battery,
                                        const std::string& numerator,
                                        const std::string& denominator, double rho,
                                        const ReversalOptions& options) {
  const RatioBounds bounds = ratio_bounds(battery, numerator, denominator);
  if (!bounds.bounded)
    throw ValidationError("target ratio: denominator is reversible, the ratio is unbounded");
  if (!(rho > bounds.lo && rho < bounds.hi))
    throw ValidationError("target ratio outside the attainable open interval");

  const EffectiveSpace sp = effective_space(battery, options);
  const Vec bm = -battery.cut_coefficients(numerator);
  const Vec bn = -battery.cut_coefficients(denominator);
  const Vec contrast = bm - rho * bn;

  auto boundary = min_variance_on_boundary(contrast, sp.p_cost, sp.polytope);
  if (!boundary)
    throw NumericError("target ratio: constraint boundary infeasible within the gap floor");
  TargetRatioResult out;
  const double var = boundary->w.dot(sp.p_cost * boundary->w);
  out.cost = cost_from_var(var, sp.max_var, options.alpha, options.bands);
  out.gaps = expand_gaps(sp, boundary->w);
  out.kkt_residual = boundary->kkt_residual;
  return out;
}

RangeAtBudget ratio_range_at_budget(const DichotomizedBattery& battery,
                                    const std::string& numerator,
                                    const std::string& denominator, double budget_c,
                                    const ReversalOptions& options) {
  const RatioBounds bounds = ratio_bounds(battery, numerator, denominator);
  if (!bounds.bounded)
    throw ValidationError("ratio range: denominator is reversible, the ratio is unbounded");

  const EffectiveSpace sp = effective_space(battery, options);
  Vec bm = -battery.cut_coefficients(numerator);
  Vec bn = -battery.cut_coefficients(denominator);
  // Flip so the denominator is positive over the whole polytope.
  if (bn.dot(sp.polytope.center()) < 0.0) {
    bm = -bm;
    bn = -bn;
  }
  const double var_budget = sp.max_var * std::pow(budget_c, options.alpha);
  const Vec center = sp.polytope.center();

  auto solve_side = [&](bool maximize) -> std::pair<double, Vec> {
    // Dinkelbach on the linear fractional (bm.w)/(bn.w): globally convergent
    // because each subproblem is linear (plus the convex budget).
    Vec w = center;
    double lambda = bm.dot(w) / bn.dot(w);
    for (int it = 0; it < 100; ++it) {
      QpProblem qp;
      const int n = sp.polytope.dim();
      qp.q = Mat::Zero(n, n);
      Vec dir = bm - lambda * bn;
      qp.lin = maximize ? Vec(-dir) : dir;
      sp.polytope.append_to(qp);

      Vec next;
      if (var_budget >= sp.max_var * (1.0 - 1e-12)) {
        next = extremize_linear(dir, sp.polytope, maximize).w;
      } else if (var_budget <= 1e-13 * sp.max_var) {
        next = center;
      } else {
        auto res = solve_qp_budget(qp, sp.p_cost, var_budget, w);
        if (!res) throw NumericError("ratio range: budget subproblem infeasible");
        next = res->w;
      }
      const double next_lambda = bm.dot(next) / bn.dot(next);
      const double improve = maximize ? next_lambda - lambda : lambda - next_lambda;
      w = next;
      if (improve <= 1e-13 * (1.0 + std::fabs(lambda))) break;
      lambda = next_lambda;
    }
    return {lambda, w};
  };

  RangeAtBudget out;
  auto [lo, arg_lo] = solve_side(false);
  auto [hi, arg_hi] = solve_side(true);
  out.lo = lo;
  out.hi = hi;
  out.arg_lo = expand_gaps(sp, arg_lo);
  out.arg_hi = expand_gaps(sp, arg_hi);
  return out;
}

}  // namespace ordrobust
