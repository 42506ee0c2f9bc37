#include "ordrobust/scaleuse.hpp"

#include "ordrobust/bootstrap.hpp"
#include "ordrobust/isotonic.hpp"
#include "ordrobust/mathutil.hpp"
#include "ordrobust/reversal.hpp"

#include <algorithm>
#include <cmath>

namespace ordrobust {

BootstrapCi bootstrap_percentile_ci(int n_boot, std::uint64_t seed,
                                    const std::function<double(Rng&)>& replicate,
                                    int max_retries) {
  if (n_boot < 2) throw ValidationError("bootstrap requires n_boot >= 2");
  std::vector<double> stats(n_boot);
  std::vector<int> redraws(n_boot, 0);
  parallel_for(n_boot, [&](int rep) {
    for (int attempt = 0;; ++attempt) {
      Rng rng(seed, static_cast<std::uint64_t>(rep) * 1000003ull + attempt);
      try {
        const double v = replicate(rng);
        if (std::isfinite(v)) {
          stats[rep] = v;
          redraws[rep] = attempt;
          return;
        }
      } catch (const std::exception&) {
        // fall through to redraw
      }
      if (attempt >= max_retries)
        throw NumericError("bootstrap replicate failed after capped redraws");
    }
  });
  std::sort(stats.begin(), stats.end());
  BootstrapCi ci;
  ci.n_boot = n_boot;
  ci.lo = quantile_type7(stats, 0.025);
  ci.hi = quantile_type7(stats, 0.975);
  for (const int r : redraws) ci.redraws += r;
  return ci;
}

namespace {

// Affine map pinning the first/last entries to [lo, hi] (constraint 1).
Vec rescale_endpoints(const Vec& labels, double lo, double hi) {
  const double first = labels(0);
  const double last = labels(labels.size() - 1);
  if (!(last > first))
    throw ValidationError("implied labels span a zero range, cost undefined");
  return (labels.array() - first) / (last - first) * (hi - lo) + lo;
}

CostValue cost_of_labels(const Vec& labels, double alpha) {
  return cost(gaps_from_labels(labels), alpha);
}

}  // namespace

ScaleUseEstimate quantile_match(const IVec& unprompted_codes,
                                const std::vector<double>& prompted_continuous,
                                const Vec& labels, double alpha, int n_boot,
                                std::uint64_t seed) {
  const int k = static_cast<int>(labels.size());
  if (unprompted_codes.empty() || prompted_continuous.empty())
    throw ValidationError("quantile_match: both arms must be nonempty");
  const double l1 = labels(0);
  const double lk = labels(k - 1);
  for (const double v : prompted_continuous) {
    if (v < l1 - 1e-9 || v > lk + 1e-9)
      throw ValidationError("quantile_match: continuous response outside [l_1, l_K]");
  }

  bool flagged = false;
  auto point = [&](const IVec& codes, const std::vector<double>& cont, bool* interpolated) {
    const int n_un = static_cast<int>(codes.size());
    std::vector<double> sorted = cont;
    std::sort(sorted.begin(), sorted.end());

    Vec implied(k);
    std::vector<bool> known(k, false);
    implied(k - 1) = lk;
    known[k - 1] = true;
    for (int cat = 1; cat <= k - 1; ++cat) {
      int count = 0;
      for (const int c : codes)
        if (c <= cat) ++count;
      const double p = static_cast<double>(count) / n_un;
      if (p <= 0.0 || p >= 1.0) {
        if (interpolated) *interpolated = true;
        continue;  // degenerate mass: interpolate from neighbors below
      }
      implied(cat - 1) = quantile_type7(sorted, p);
      known[cat - 1] = true;
    }
    // Linear interpolation over the category index for degenerate entries,
    // anchored at l_1 below the scale.
    for (int i = 0; i < k; ++i) {
      if (known[i]) continue;
      int left = i - 1;
      while (left >= 0 && !known[left]) --left;
      int right = i + 1;
      while (right < k && !known[right]) ++right;
      const double left_val = left >= 0 ? implied(left) : l1;
      const double left_pos = left >= 0 ? left : -1;
      const double right_val = implied(right);  // l_K entry is always known
      const double t = (i - left_pos) / (right - left_pos);
      implied(i) = left_val + t * (right_val - left_val);
    }
    return implied;
  };

  ScaleUseEstimate est;
  est.method = "linear_prompting";
  Vec implied = point(unprompted_codes, prompted_continuous, &est.interpolated_category);
  Vec repaired = pav_nondecreasing(implied);
  est.monotonicity_repaired = (repaired - implied).cwiseAbs().maxCoeff() > 0.0;
  est.implied_labels = rescale_endpoints(repaired, l1, lk);
  est.c = cost_of_labels(est.implied_labels, alpha);
  est.n_used = static_cast<int>(unprompted_codes.size() + prompted_continuous.size());
  est.n_boot = n_boot;
  flagged = est.interpolated_category;

  BootstrapCi ci = bootstrap_percentile_ci(n_boot, seed, [&](Rng& rng) {
    IVec codes(unprompted_codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i)
      codes[i] = unprompted_codes[rng.uniform_int(static_cast<int>(unprompted_codes.size()))];
    std::vector<double> cont(prompted_continuous.size());
    for (std::size_t i = 0; i < cont.size(); ++i)
      cont[i] = prompted_continuous[rng.uniform_int(static_cast<int>(prompted_continuous.size()))];
    Vec lab = pav_nondecreasing(point(codes, cont, nullptr));
    return cost_of_labels(rescale_endpoints(lab, l1, lk), alpha).c;
  });
  est.ci_lo = ci.lo;
  est.ci_hi = ci.hi;
  est.interpolated_category = flagged;
  return est;
}

ScaleUseEstimate objective_subjective(const IVec& subjective_codes,
                                      const std::vector<double>& objective_values,
                                      const Vec& labels, double alpha, int n_boot,
                                      std::uint64_t seed) {
  const int k = static_cast<int>(labels.size());
  if (subjective_codes.size() != objective_values.size() || subjective_codes.empty())
    throw ValidationError("objective_subjective: paired nonempty samples required");

  auto point = [&](const IVec& codes, const std::vector<double>& objective,
                   bool* interpolated) {
    Vec sums = Vec::Zero(k);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(k);
    for (std::size_t i = 0; i < codes.size(); ++i) {
      sums(codes[i] - 1) += objective[i];
      counts(codes[i] - 1)++;
    }
    int distinct = 0;
    for (int c = 0; c < k; ++c)
      if (counts(c) > 0) ++distinct;
    if (distinct < 2)
      throw ValidationError("objective_subjective: fewer than 2 categories present");

    Vec means(k);
    for (int c = 0; c < k; ++c) means(c) = counts(c) > 0 ? sums(c) / counts(c) : 0.0;
    // Absent categories: linear interpolation across the index, extrapolating
    // flat at the edges.
    for (int c = 0; c < k; ++c) {
      if (counts(c) > 0) continue;
      if (interpolated) *interpolated = true;
      int left = c - 1;
      while (left >= 0 && counts(left) == 0) --left;
      int right = c + 1;
      while (right < k && counts(right) == 0) ++right;
      if (left < 0) {
        means(c) = means(right);
      } else if (right >= k) {
        means(c) = means(left);
      } else {
        const double t = static_cast<double>(c - left) / (right - left);
        means(c) = means(left) + t * (means(right) - means(left));
      }
    }
    return means;
  };

  ScaleUseEstimate est;
  est.method = "objective_subjective";
  Vec means = point(subjective_codes, objective_values, &est.interpolated_category);
  Vec repaired = pav_nondecreasing(means);
  est.monotonicity_repaired = (repaired - means).cwiseAbs().maxCoeff() > 0.0;
  est.implied_labels = rescale_endpoints(repaired, labels(0), labels(k - 1));
  est.c = cost_of_labels(est.implied_labels, alpha);
  est.n_used = static_cast<int>(subjective_codes.size());
  est.n_boot = n_boot;

  BootstrapCi ci = bootstrap_percentile_ci(n_boot, seed, [&](Rng& rng) {
    const int n = static_cast<int>(subjective_codes.size());
    IVec codes(n);
    std::vector<double> obj(n);
    for (int i = 0; i < n; ++i) {
      const int j = rng.uniform_int(n);
      codes[i] = subjective_codes[j];
      obj[i] = objective_values[j];
    }
    Vec lab = pav_nondecreasing(point(codes, obj, nullptr));
    return cost_of_labels(rescale_endpoints(lab, labels(0), labels(k - 1)), alpha).c;
  });
  est.ci_lo = ci.lo;
  est.ci_hi = ci.hi;
  return est;
}

SliderCostResult slider_cost(const std::vector<Vec>& slider_positions, const Vec& labels,
                             double alpha, int n_boot, std::uint64_t seed) {
  const int k = static_cast<int>(labels.size());
  const double l1 = labels(0);
  const double lk = labels(k - 1);

  SliderCostResult out;
  Vec mean_profile = Vec::Zero(k);
  for (const Vec& raw : slider_positions) {
    if (raw.size() != k)
      throw ValidationError("slider vector length does not match K");
    for (int i = 0; i < k; ++i) {
      if (raw(i) < l1 - 1e-9 || raw(i) > lk + 1e-9)
        throw ValidationError("slider position outside [l_1, l_K]");
    }
    Vec repaired = pav_nondecreasing(raw);
    if ((repaired - raw).cwiseAbs().maxCoeff() > 0.0) out.estimate.monotonicity_repaired = true;
    if (!(repaired(k - 1) - repaired(0) > 0.0)) {
      out.estimate.excluded++;  // constant vector carries no shape information
      continue;
    }
    Vec normalized = rescale_endpoints(repaired, l1, lk);
    out.per_respondent_c.push_back(cost_of_labels(normalized, alpha).c);
    mean_profile += normalized;
  }
  if (out.per_respondent_c.empty())
    throw ValidationError("slider_cost: no usable slider vectors");

  const int n_used = static_cast<int>(out.per_respondent_c.size());
  out.estimate.method = "sliders";
  out.estimate.n_used = n_used;
  out.estimate.n_boot = n_boot;
  out.estimate.implied_labels =
      rescale_endpoints(pav_nondecreasing(mean_profile / n_used), l1, lk);
  double mean_c = 0.0;
  for (const double c : out.per_respondent_c) mean_c += c;
  mean_c /= n_used;
  CostValue cv;
  cv.alpha = alpha;
  cv.c = mean_c;
  cv.band = band_for(mean_c);
  out.estimate.c = cv;

  BootstrapCi ci = bootstrap_percentile_ci(n_boot, seed, [&](Rng& rng) {
    double s = 0.0;
    for (int i = 0; i < n_used; ++i) s += out.per_respondent_c[rng.uniform_int(n_used)];
    return s / n_used;
  });
  out.estimate.ci_lo = ci.lo;
  out.estimate.ci_hi = ci.hi;
  return out;
}

GammaReport gamma_analysis(const Mat& x, const std::vector<std::string>& names,
                           const Vec& continuous_outcome, const Vec& discrete_outcome,
                           int n_boot, std::uint64_t seed) {
  if (x.rows() != continuous_outcome.size() || x.rows() != discrete_outcome.size())
    throw ValidationError("gamma_analysis: outcome lengths do not match the design");

  const OlsFit fit_c = ols_fit(x, continuous_outcome);
  const OlsFit fit_d = ols_fit(x, discrete_outcome);

  const int m = static_cast<int>(x.cols());
  const int n = static_cast<int>(x.rows());

  // Paired bootstrap: resample rows, re-run both regressions.
  Mat gammas(n_boot, m);
  parallel_for(n_boot, [&](int rep) {
    Rng rng(seed, rep);
    Mat xb(n, m);
    Vec yc(n);
    Vec yd(n);
    for (int i = 0; i < n; ++i) {
      const int j = rng.uniform_int(n);
      xb.row(i) = x.row(j);
      yc(i) = continuous_outcome(j);
      yd(i) = discrete_outcome(j);
    }
    const OlsFit bc = ols_fit(xb, yc);
    const OlsFit bd = ols_fit(xb, yd);
    gammas.row(rep) = (bc.beta - bd.beta).transpose();
  });

  GammaReport report;
  for (int j = 0; j < m; ++j) {
    GammaReport::Entry e;
    e.name = names[j];
    e.beta_cont = fit_c.beta(j);
    e.beta_disc = fit_d.beta(j);
    e.gamma = e.beta_cont - e.beta_disc;
    const Vec col = gammas.col(j);
    const double mean = col.mean();
    e.se_gamma = std::sqrt((col.array() - mean).square().sum() / (n_boot - 1));
    const bool opposite = e.beta_cont * e.beta_disc < 0.0;
    e.assumption2_flag = opposite && std::fabs(e.gamma) > 1.96 * e.se_gamma;
    report.entries.push_back(e);
  }
  return report;
}

std::vector<WorstCaseGammaPoint> worst_case_gamma(const Mat& x,
                                                  const std::vector<std::string>& names,
                                                  const Vec& continuous_outcome,
                                                  const OrdinalOutcome& discrete_outcome,
                                                  const std::string& focal,
                                                  AlphaPolicy policy,
                                                  const std::vector<double>& cost_grid,
                                                  int n_levels) {
  // Fine discretization of the continuous outcome for battery fitting. Both
  // measures live on the same declared scale, so the comparison uses the
  // discrete outcome's label range.
  const double l1 = discrete_outcome.labels(0);
  const double lk = discrete_outcome.labels(discrete_outcome.categories() - 1);
  if (continuous_outcome.minCoeff() < l1 - 1e-9 || continuous_outcome.maxCoeff() > lk + 1e-9)
    throw ValidationError("worst_case_gamma: continuous outcome outside the scale range");
  Vec shifted = (continuous_outcome.array() - l1).matrix();
  DiscretizeResult disc = discretize(shifted, n_levels, lk - l1);

  Dataset cont_data;
  cont_data.outcome.codes = disc.codes;
  cont_data.outcome.labels = (disc.labels.array() + l1).matrix();
  cont_data.design.x = x;
  cont_data.design.names = names;
  cont_data.design.intercept = true;
  cont_data.design.focal = {focal};

  Dataset disc_data = cont_data;
  disc_data.outcome = discrete_outcome;

  const DichotomizedBattery battery_cont = fit_battery(cont_data);
  const DichotomizedBattery battery_disc = fit_battery(disc_data);

  ReversalOptions opts_cont;
  opts_cont.alpha = alpha_for(n_levels, policy);
  ReversalOptions opts_disc;
  opts_disc.alpha = alpha_for(discrete_outcome.categories(), policy);

  std::vector<WorstCaseGammaPoint> out(cost_grid.size());
  parallel_for(static_cast<int>(cost_grid.size()), [&](int i) {
    WorstCaseGammaPoint pt;
    pt.cost = cost_grid[i];
    const RangeAtBudget rc = beta_range_at_budget(battery_cont, focal, pt.cost, opts_cont);
    const RangeAtBudget rd = beta_range_at_budget(battery_disc, focal, pt.cost, opts_disc);
    pt.lo_cont = rc.lo;
    pt.hi_cont = rc.hi;
    pt.lo_disc = rd.lo;
    pt.hi_disc = rd.hi;
    pt.gamma_hi = rc.hi - rd.hi;
    pt.gamma_lo = rc.lo - rd.lo;
    out[i] = pt;
  });
  return out;
}

}  // namespace ordrobust
