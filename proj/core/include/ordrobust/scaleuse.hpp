#pragma once

#include "ordrobust/battery.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/dataset.hpp"

#include <string>
#include <vector>

namespace ordrobust {

struct ScaleUseEstimate {
  std::string method;
  Vec implied_labels;  // length K, endpoints pinned to [l_1, l_K]
  CostValue c;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  int n_boot = 0;
  int n_used = 0;
  bool monotonicity_repaired = false;
  bool interpolated_category = false;
  int excluded = 0;
};

/// Linear-prompting estimator: matches the unprompted discrete CDF against the
/// prompted continuous distribution at every category boundary.
ScaleUseEstimate quantile_match(const IVec& unprompted_codes,
                                const std::vector<double>& prompted_continuous,
                                const Vec& labels, double alpha, int n_boot = 500,
                                std::uint64_t seed = 1);

/// Per-category means of an objective quantity, isotonic-repaired and rescaled.
ScaleUseEstimate objective_subjective(const IVec& subjective_codes,
                                      const std::vector<double>& objective_values,
                                      const Vec& labels, double alpha, int n_boot = 500,
                                      std::uint64_t seed = 1);

struct SliderCostResult {
  ScaleUseEstimate estimate;  // mean c across respondents
  std::vector<double> per_respondent_c;
};

SliderCostResult slider_cost(const std::vector<Vec>& slider_positions, const Vec& labels,
                             double alpha, int n_boot = 500, std::uint64_t seed = 1);

struct GammaReport {
  struct Entry {
    std::string name;
    double beta_cont = 0.0;
    double beta_disc = 0.0;
    double gamma = 0.0;
    double se_gamma = 0.0;
    bool assumption2_flag = false;
  };
  std::vector<Entry> entries;
};

/// gamma_m = beta_cont_m - beta_disc_m with a paired-bootstrap standard error;
/// flags sign disagreements with a significant gamma.
GammaReport gamma_analysis(const Mat& x, const std::vector<std::string>& names,
                           const Vec& continuous_outcome, const Vec& discrete_outcome,
                           int n_boot = 500, std::uint64_t seed = 1);

struct WorstCaseGammaPoint {
  double cost = 0.0;
  double lo_cont = 0.0;
  double hi_cont = 0.0;
  double lo_disc = 0.0;
  double hi_disc = 0.0;
  double gamma_lo = 0.0;
  double gamma_hi = 0.0;
};

/// Worst-case coefficient spreads for a continuous measure (discretized to
/// n_levels for battery fitting) against a discrete measure, per cost budget.
std::vector<WorstCaseGammaPoint> worst_case_gamma(const Mat& x,
                                                  const std::vector<std::string>& names,
                                                  const Vec& continuous_outcome,
                                                  const OrdinalOutcome& discrete_outcome,
                                                  const std::string& focal,
                                                  AlphaPolicy policy,
                                                  const std::vector<double>& cost_grid,
                                                  int n_levels = 101);

}  // namespace ordrobust
