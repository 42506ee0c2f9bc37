// Shared test fixtures: random datasets with controllable structure and
// hand-built batteries/kernels for optimizer tests.
#pragma once

#include "ordrobust/battery.hpp"
#include "ordrobust/dataset.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace fixtures {

using ordrobust::Dataset;
using ordrobust::IVec;
using ordrobust::Mat;
using ordrobust::Rng;
using ordrobust::Vec;

struct RandomDatasetOptions {
  int n = 200;
  int k = 5;
  int m_covariates = 2;  // excluding intercept
  int clusters = 0;      // 0: none
  int units = 0;         // 0: no fixed effects
  bool instruments = false;
  double effect_scale = 1.0;
  double noise_sd = 1.0;
};

// Latent-threshold data with dense categories; covariates are standard normal
// plus one binary column when m_covariates >= 2.
inline Dataset random_dataset(Rng& rng, const RandomDatasetOptions& opt) {
  Dataset data;
  const int n = opt.n;
  const int m = opt.m_covariates;

  Mat x(n, m + 1);
  x.col(0) = Vec::Ones(n);
  for (int c = 1; c <= m; ++c) {
    for (int i = 0; i < n; ++i) {
      x(i, c) = c == 2 ? (rng.bernoulli(0.5) ? 1.0 : 0.0) : rng.normal();
    }
  }
  Vec beta(m + 1);
  beta(0) = 0.0;
  for (int c = 1; c <= m; ++c) beta(c) = opt.effect_scale * (rng.uniform() * 2.0 - 1.0);

  Vec unit_shift = Vec::Zero(std::max(1, opt.units));
  if (opt.units > 0) {
    for (int u = 0; u < opt.units; ++u) unit_shift(u) = rng.normal();
  }

  Vec endo_extra = Vec::Zero(n);
  Mat z;
  if (opt.instruments) {
    // First covariate becomes endogenous; its instrument moves it but not the
    // structural error.
    z = x;
    for (int i = 0; i < n; ++i) {
      const double instrument = rng.normal();
      const double common = rng.normal();
      x(i, 1) = 0.8 * instrument + 0.6 * common + 0.3 * rng.normal();
      z(i, 1) = instrument;
      endo_extra(i) = 0.5 * common;
    }
  }

  data.design.unit_ids.clear();
  IVec units(n, 0);
  if (opt.units > 0) {
    for (int i = 0; i < n; ++i) units[i] = i % opt.units;
    data.design.unit_ids = units;
  }
  if (opt.clusters > 0) {
    IVec clusters(n);
    for (int i = 0; i < n; ++i) clusters[i] = i % opt.clusters;
    data.design.cluster_ids = clusters;
  }

  // Latent index and equiprobable-ish thresholds.
  Vec s(n);
  for (int i = 0; i < n; ++i) {
    double mean = x.row(i).dot(beta) + endo_extra(i);
    if (opt.units > 0) mean += unit_shift(units[i]);
    s(i) = mean + opt.noise_sd * rng.normal();
  }
  std::vector<double> sorted(s.data(), s.data() + n);
  std::sort(sorted.begin(), sorted.end());
  data.outcome.labels = Vec::LinSpaced(opt.k, 1.0, static_cast<double>(opt.k));
  data.outcome.codes.resize(n);
  for (int i = 0; i < n; ++i) {
    int code = 1;
    for (int c = 1; c < opt.k; ++c) {
      const double cut = sorted[(c * n) / opt.k];
      if (s(i) > cut) code = c + 1;
    }
    data.outcome.codes[i] = code;
  }

  data.design.x = x;
  data.design.intercept = true;
  data.design.names.push_back("(Intercept)");
  for (int c = 1; c <= m; ++c) data.design.names.push_back("x" + std::to_string(c));
  if (opt.instruments) data.design.z = z;
  data.design.focal = {"x1"};
  return data;
}

// Battery with prescribed per-cut coefficients for one focal regressor named
// "x"; enough structure for the reversal-family ops (no variance kernel).
inline ordrobust::DichotomizedBattery synthetic_battery(const Vec& cut_coefficients,
                                                        double l1 = 0.0,
                                                        double range = -1.0) {
  const int cuts = static_cast<int>(cut_coefficients.size());
  ordrobust::DichotomizedBattery battery;
  battery.k_categories = cuts + 1;
  battery.n = 100;
  battery.m = 1;
  battery.dof_resid = 99;
  battery.coef_names = {"x"};
  if (range <= 0.0) range = static_cast<double>(cuts);
  battery.labels = Vec::LinSpaced(cuts + 1, l1, l1 + range);
  battery.beta_d = cut_coefficients;
  battery.effective = ordrobust::effective_cuts_for(std::vector<int>(cuts + 1, 1));
  battery.empty_category.assign(cuts + 1, false);
  return battery;
}

// Kernel with prescribed b and V (trivial dedupe, equidistant labels).
inline ordrobust::CoefficientKernel synthetic_kernel(const Vec& b, const Mat& v, double dof,
                                                     double l1 = 0.0, double range = -1.0) {
  const int cuts = static_cast<int>(b.size());
  ordrobust::CoefficientKernel kernel;
  kernel.name = "x";
  kernel.k_categories = cuts + 1;
  if (range <= 0.0) range = static_cast<double>(cuts);
  kernel.range_value = range;
  kernel.labels = Vec::LinSpaced(cuts + 1, l1, l1 + range);
  kernel.b = b;
  kernel.v = v;
  kernel.dof_t = dof;
  kernel.effective = ordrobust::effective_cuts_for(std::vector<int>(cuts + 1, 1));
  kernel.b_eff = b;
  kernel.v_eff = v;
  return kernel;
}

// Random symmetric PSD matrix with unit-scale eigenvalues.
inline Mat random_psd(Rng& rng, int n, double ridge = 0.05) {
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a.transpose() * a / n + ridge * Mat::Identity(n, n);
}

}  // namespace fixtures
