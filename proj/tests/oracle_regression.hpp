// Test-only direct-regression oracle. Computes coefficients, residuals, and
// sandwich variances straight from the textbook matrix formulas, with no code
// shared with the battery/kernel implementation path it is used to verify.
#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/dataset.hpp"
#include "ordrobust/mathutil.hpp"

#include <Eigen/Dense>
#include <optional>

namespace oracle {

using ordrobust::IVec;
using ordrobust::Mat;
using ordrobust::SeType;
using ordrobust::Vec;

struct DirectFit {
  Vec beta;
  Vec resid;
  Mat vcov;       // full coefficient covariance
  double dof_t = 0.0;
  double se(int j) const { return std::sqrt(vcov(j, j)); }
  double p(int j) const {
    return ordrobust::student_t_two_sided_p(beta(j) / se(j), dof_t);
  }
};

inline Mat demean_rows(const Mat& x, const IVec& ids) {
  int groups = 0;
  for (const int g : ids) groups = std::max(groups, g + 1);
  Mat sums = Mat::Zero(groups, x.cols());
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(groups);
  for (int i = 0; i < x.rows(); ++i) {
    sums.row(ids[i]) += x.row(i);
    counts(ids[i])++;
  }
  Mat out = x;
  for (int i = 0; i < x.rows(); ++i) out.row(i) -= sums.row(ids[i]) / counts(ids[i]);
  return out;
}

// Direct fit of y on x. Fixed effects demean both sides (x must exclude the
// intercept in that case); just-identified 2SLS passes z of the same shape as
// x. Small-sample conventions: HC1 and G/(G-1)*(N-1)/dof, matching the
// production configuration defaults.
inline DirectFit direct_fit(Mat x, Vec y, SeType se_type, const IVec& cluster_ids = {},
                            const IVec& unit_ids = {}, std::optional<Mat> z_opt = {}) {
  const int n = static_cast<int>(x.rows());
  int n_units = 0;
  if (!unit_ids.empty()) {
    for (const int g : unit_ids) n_units = std::max(n_units, g + 1);
    x = demean_rows(x, unit_ids);
    Mat ym = demean_rows(y, unit_ids);
    y = ym.col(0);
  }
  const int m = static_cast<int>(x.cols());
  const double dof = static_cast<double>(n - m - n_units);

  DirectFit fit;
  Mat bread;  // (X'X)^-1 or (Z'X)^-1
  if (z_opt) {
    const Mat& z = *z_opt;
    bread = (z.transpose() * x).fullPivLu().inverse();
    fit.beta = bread * (z.transpose() * y);
  } else {
    bread = (x.transpose() * x).fullPivLu().inverse();
    fit.beta = bread * (x.transpose() * y);
  }
  fit.resid = y - x * fit.beta;
  const Mat& w = z_opt ? *z_opt : x;  // instrument side of the sandwich

  Mat meat(m, m);
  double correction = 1.0;
  fit.dof_t = dof;
  switch (se_type) {
    case SeType::homoskedastic: {
      const double s2 = fit.resid.squaredNorm() / dof;
      fit.vcov = s2 * bread * (w.transpose() * w) * bread.transpose();
      return fit;
    }
    case SeType::robust: {
      meat = w.transpose() * fit.resid.array().square().matrix().asDiagonal() * w;
      correction = static_cast<double>(n) / dof;
      break;
    }
    case SeType::clustered: {
      int g_count = 0;
      for (const int g : cluster_ids) g_count = std::max(g_count, g + 1);
      Mat sums = Mat::Zero(g_count, m);
      for (int i = 0; i < n; ++i) sums.row(cluster_ids[i]) += fit.resid(i) * w.row(i);
      meat = sums.transpose() * sums;
      correction = (static_cast<double>(g_count) / (g_count - 1.0)) *
                   ((static_cast<double>(n) - 1.0) / dof);
      fit.dof_t = static_cast<double>(g_count - 1);
      break;
    }
  }
  fit.vcov = correction * bread * meat * bread.transpose();
  return fit;
}

}  // namespace oracle
