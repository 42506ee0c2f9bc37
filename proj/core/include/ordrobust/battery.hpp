#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/dataset.hpp"

#include <string>
#include <vector>

namespace ordrobust {

enum class Estimator { ols, fe, tsls };
std::string estimator_name(Estimator e);

/// Mapping from original cuts to effective cuts after collapsing duplicates
/// (empty interior categories produce identical dichotomizations).
struct EffectiveCuts {
  std::vector<std::vector<int>> groups;  // effective index -> original cut indices
  Mat expand;                            // (K-1) x E, entries 1/|group|

  int effective() const { return static_cast<int>(groups.size()); }
  int original() const { return static_cast<int>(expand.rows()); }
  bool trivial() const { return effective() == original(); }
  /// Equal-split expansion (variance-minimal given the group sums).
  Vec expand_gaps(const Vec& w_eff) const { return expand * w_eff; }
  Vec collapse_sums(const Vec& w_full) const;
  Vec floor_for(double epsilon_gap) const;  // per-effective-gap floor
};

EffectiveCuts effective_cuts_for(const std::vector<int>& category_counts);

/// The K-1 cut regressions plus everything needed to reconstruct coefficients,
/// residuals, and sandwich variances of any relabeled outcome.
struct DichotomizedBattery {
  Estimator estimator = Estimator::ols;
  int n = 0;
  int m = 0;
  int k_categories = 0;
  double dof_resid = 0.0;
  int n_units = 0;
  int n_clusters = 0;
  std::vector<std::string> coef_names;
  Vec labels;      // outcome coding carried from the dataset
  Mat beta_d;      // (K-1) x M cut coefficients
  Mat resid_d;     // N x (K-1) cut residuals
  Mat bread;       // (X'X)^-1 for OLS/FE, (Z'X)^-1 for 2SLS
  Mat proj;        // N x M, proj(i,m): weight of observation i in beta_m
  IVec cluster_ids;
  EffectiveCuts effective;
  std::vector<bool> empty_category;

  int cut_count() const { return k_categories - 1; }
  int coef_index(const std::string& name) const;
  double range() const { return labels(labels.size() - 1) - labels(0); }
  GapVector identity_gaps() const;
  /// Per-cut coefficients for one regressor, deduped to effective cuts.
  Vec cut_coefficients(const std::string& name) const;
};

DichotomizedBattery fit_battery(const Dataset& data);

/// beta_m(w) = -sum_k w_k beta_d(k, m); exactly linear in the gaps.
double recompose_beta(const DichotomizedBattery& battery, const GapVector& gaps,
                      const std::string& focal);

/// Residuals of the relabeled regression: -resid_d * w.
Vec recompose_residuals(const DichotomizedBattery& battery, const GapVector& gaps);

struct SmallSample {
  bool hc1 = true;                 // robust: N / dof_resid
  bool cluster_correction = true;  // clustered: G/(G-1) * (N-1)/dof_resid
};

/// (b, V) with beta_m(w) = b.w and Var_m(w) = w'Vw under the chosen SE type.
struct CoefficientKernel {
  std::string name;
  int k_categories = 0;
  double range_value = 0.0;
  Vec labels;
  Vec b;   // K-1
  Mat v;   // (K-1) x (K-1), symmetric PSD
  double dof_t = 0.0;
  SeType se_type = SeType::robust;
  EffectiveCuts effective;
  Vec b_eff;
  Mat v_eff;

  double beta(const GapVector& gaps) const { return b.dot(gaps.w); }
  double variance(const GapVector& gaps) const { return gaps.w.dot(v * gaps.w); }
  GapVector identity_gaps() const;
};

CoefficientKernel build_kernel(const DichotomizedBattery& battery, const std::string& focal,
                               SeType se_type, const SmallSample& small_sample = {});

/// Plain least-squares helper shared by the gamma analysis.
struct OlsFit {
  Vec beta;
  Vec resid;
  Mat xtx_inv;
  double sigma2 = 0.0;  // SSR / (N - M)
};
OlsFit ols_fit(const Mat& x, const Vec& y);

}  // namespace ordrobust
