#include "ordrobust/battery.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <set>

namespace ordrobust {

std::string estimator_name(Estimator e) {
  switch (e) {
    case Estimator::ols: return "ols";
    case Estimator::fe: return "fe";
    case Estimator::tsls: return "tsls";
  }
  return "ols";
}

Vec EffectiveCuts::collapse_sums(const Vec& w_full) const {
  Vec out(effective());
  for (int j = 0; j < effective(); ++j) {
    double s = 0.0;
    for (const int k : groups[j]) s += w_full(k);
    out(j) = s;
  }
  return out;
}

Vec EffectiveCuts::floor_for(double epsilon_gap) const {
  Vec f(effective());
  for (int j = 0; j < effective(); ++j)
    f(j) = epsilon_gap * static_cast<double>(groups[j].size());
  return f;
}

EffectiveCuts effective_cuts_for(const std::vector<int>& category_counts) {
  const int k = static_cast<int>(category_counts.size());
  EffectiveCuts eff;
  // Cuts k and k+1 coincide exactly when category k+1 is empty.
  std::vector<std::vector<int>> groups;
  for (int cut = 0; cut < k - 1; ++cut) {
    const bool merge = cut > 0 && category_counts[cut] == 0;
    if (merge) {
      groups.back().push_back(cut);
    } else {
      groups.push_back({cut});
    }
  }
  eff.groups = groups;
  eff.expand = Mat::Zero(k - 1, static_cast<int>(groups.size()));
  for (std::size_t j = 0; j < groups.size(); ++j) {
    const double share = 1.0 / static_cast<double>(groups[j].size());
    for (const int cut : groups[j]) eff.expand(cut, static_cast<int>(j)) = share;
  }
  return eff;
}

int DichotomizedBattery::coef_index(const std::string& name) const {
  for (std::size_t i = 0; i < coef_names.size(); ++i)
    if (coef_names[i] == name) return static_cast<int>(i);
  throw ValidationError("unknown focal coefficient '" + name + "'");
}

GapVector DichotomizedBattery::identity_gaps() const { return gaps_from_labels(labels); }

Vec DichotomizedBattery::cut_coefficients(const std::string& name) const {
  const int m_idx = coef_index(name);
  const Vec full = beta_d.col(m_idx);
  Vec out(effective.effective());
  for (int j = 0; j < effective.effective(); ++j) out(j) = full(effective.groups[j][0]);
  return out;
}

GapVector CoefficientKernel::identity_gaps() const { return gaps_from_labels(labels); }

namespace {

// Within-transform by unit means.
Mat demean_by(const Mat& x, const IVec& ids, int n_groups) {
  Mat means = Mat::Zero(n_groups, x.cols());
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(n_groups);
  for (int i = 0; i < x.rows(); ++i) {
    means.row(ids[i]) += x.row(i);
    counts(ids[i])++;
  }
  for (int g = 0; g < n_groups; ++g) means.row(g) /= static_cast<double>(counts(g));
  Mat out = x;
  for (int i = 0; i < x.rows(); ++i) out.row(i) -= means.row(ids[i]);
  return out;
}

int group_count(const IVec& ids) {
  int mx = -1;
  for (const int v : ids) mx = std::max(mx, v);
  return mx + 1;
}

}  // namespace

OlsFit ols_fit(const Mat& x, const Vec& y) {
  Eigen::ColPivHouseholderQR<Mat> qr(x);
  if (qr.rank() < x.cols()) throw ValidationError("rank-deficient design in least squares");
  OlsFit fit;
  fit.beta = qr.solve(y);
  fit.resid = y - x * fit.beta;
  // (X'X)^-1 from the R factor: X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
  const int m = static_cast<int>(x.cols());
  Mat r = qr.matrixR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
  Mat rinv = r.triangularView<Eigen::Upper>().solve(Mat::Identity(m, m));
  Mat inv_pivoted = rinv * rinv.transpose();
  const auto perm = qr.colsPermutation();
  fit.xtx_inv = perm * inv_pivoted * perm.transpose();
  const double dof = static_cast<double>(x.rows() - m);
  fit.sigma2 = dof > 0 ? fit.resid.squaredNorm() / dof : 0.0;
  return fit;
}

DichotomizedBattery fit_battery(const Dataset& data) {
  const DesignSpec& design = data.design;
  const int n = design.n();
  const int k = data.outcome.categories();

  DichotomizedBattery battery;
  battery.k_categories = k;
  battery.labels = data.outcome.labels;
  battery.n = n;
  battery.cluster_ids = design.cluster_ids;
  battery.n_clusters = design.cluster_ids.empty() ? 0 : group_count(design.cluster_ids);

  const bool fe = !design.unit_ids.empty();
  const bool tsls = design.has_instruments();
  if (fe && tsls)
    throw ValidationError("fixed effects and instruments cannot be combined");
  battery.estimator = fe ? Estimator::fe : (tsls ? Estimator::tsls : Estimator::ols);

  Mat x = design.x;
  std::vector<std::string> names = design.names;
  if (fe) {
    battery.n_units = group_count(design.unit_ids);
    if (design.intercept) {
      // The intercept is absorbed by the within transform.
      x = x.rightCols(x.cols() - 1).eval();
      names.erase(names.begin());
    }
    x = demean_by(x, design.unit_ids, battery.n_units);
  }
  const int m = static_cast<int>(x.cols());
  battery.m = m;
  battery.coef_names = names;
  battery.dof_resid = fe ? static_cast<double>(n - m - battery.n_units)
                         : static_cast<double>(n - m);
  if (battery.dof_resid <= 0) throw ValidationError("no residual degrees of freedom");

  // Rank diagnostics via column-pivoted QR; report the offending columns.
  Eigen::ColPivHouseholderQR<Mat> qr(x);
  {
    const int rank = static_cast<int>(qr.rank());
    if (rank < m) {
      const auto perm = qr.colsPermutation().indices();
      std::string offenders;
      for (int i = rank; i < m; ++i) {
        if (!offenders.empty()) offenders += ", ";
        offenders += names[perm(i)];
      }
      throw ValidationError("rank-deficient design; offending columns: " + offenders);
    }
  }

  if (tsls) {
    Mat z = design.z;
    Mat zx = z.transpose() * x;
    Eigen::FullPivLU<Mat> lu(zx);
    if (!lu.isInvertible())
      throw ValidationError("Z'X is singular: instruments do not identify the design");
    battery.bread = lu.inverse();
    battery.proj = z * battery.bread.transpose();
  } else {
    // (X'X)^-1 from the R factor: X P = Q R  =>  (X'X)^-1 = P R^-1 R^-T P'.
    Mat r = qr.matrixR().topLeftCorner(m, m).template triangularView<Eigen::Upper>();
    Mat rinv = r.triangularView<Eigen::Upper>().solve(Mat::Identity(m, m));
    const auto perm = qr.colsPermutation();
    battery.bread = perm * (rinv * rinv.transpose()) * perm.transpose();
    battery.proj = x * battery.bread;  // symmetric bread
  }

  // Dichotomize and regress every cut; columns are independent, so run them in
  // parallel with pre-assigned output slots.
  Mat d(n, k - 1);
  for (int cut = 0; cut < k - 1; ++cut) {
    for (int i = 0; i < n; ++i) d(i, cut) = data.outcome.codes[i] <= cut + 1 ? 1.0 : 0.0;
  }
  if (fe) d = demean_by(d, design.unit_ids, battery.n_units);

  battery.beta_d.resize(k - 1, m);
  battery.resid_d.resize(n, k - 1);
  const Mat& x_used = x;
  parallel_for(k - 1, [&](int cut) {
    const Vec beta = battery.proj.transpose() * d.col(cut);
    battery.beta_d.row(cut) = beta.transpose();
    battery.resid_d.col(cut) = d.col(cut) - x_used * beta;
  });

  const auto counts = data.outcome.category_counts();
  battery.empty_category.resize(k);
  for (int c = 0; c < k; ++c) battery.empty_category[c] = counts[c] == 0;
  battery.effective = effective_cuts_for(counts);
  return battery;
}

double recompose_beta(const DichotomizedBattery& battery, const GapVector& gaps,
                      const std::string& focal) {
  const int m_idx = battery.coef_index(focal);
  if (gaps.w.size() != battery.cut_count())
    throw ValidationError("gap vector length does not match the battery");
  return -battery.beta_d.col(m_idx).dot(gaps.w);
}

Vec recompose_residuals(const DichotomizedBattery& battery, const GapVector& gaps) {
  if (gaps.w.size() != battery.cut_count())
    throw ValidationError("gap vector length does not match the battery");
  return -(battery.resid_d * gaps.w);
}

CoefficientKernel build_kernel(const DichotomizedBattery& battery, const std::string& focal,
                               SeType se_type, const SmallSample& small_sample) {
  const int m_idx = battery.coef_index(focal);
  const int cuts = battery.cut_count();
  const int n = battery.n;

  CoefficientKernel kernel;
  kernel.name = focal;
  kernel.k_categories = battery.k_categories;
  kernel.labels = battery.labels;
  kernel.range_value = battery.range();
  kernel.se_type = se_type;
  kernel.effective = battery.effective;
  kernel.b = -battery.beta_d.col(m_idx);
  kernel.dof_t = battery.dof_resid;

  const Vec weight = battery.proj.col(m_idx);

  Mat v(cuts, cuts);
  switch (se_type) {
    case SeType::homoskedastic: {
      const double bread_mm = weight.squaredNorm();
      v = bread_mm * (battery.resid_d.transpose() * battery.resid_d) / battery.dof_resid;
      break;
    }
    case SeType::robust: {
      const Vec w2 = weight.array().square();
      v = battery.resid_d.transpose() * w2.asDiagonal() * battery.resid_d;
      if (small_sample.hc1) v *= static_cast<double>(n) / battery.dof_resid;
      break;
    }
    case SeType::clustered: {
      if (battery.cluster_ids.empty())
        throw ValidationError("clustered standard errors requested without cluster ids");
      const int g = battery.n_clusters;
      if (g < 2) throw ValidationError("clustered standard errors need at least 2 clusters");
      Mat t = Mat::Zero(g, cuts);
      for (int i = 0; i < n; ++i)
        t.row(battery.cluster_ids[i]) += weight(i) * battery.resid_d.row(i);
      v = t.transpose() * t;
      if (small_sample.cluster_correction) {
        v *= (static_cast<double>(g) / (g - 1.0)) *
             ((static_cast<double>(n) - 1.0) / battery.dof_resid);
      }
      kernel.dof_t = static_cast<double>(g - 1);
      break;
    }
  }
  kernel.v = 0.5 * (v + v.transpose());

  // expand' averages within groups; duplicate cuts carry identical rows, so
  // the effective kernel is exact.
  kernel.b_eff = battery.effective.expand.transpose() * kernel.b;
  kernel.v_eff = battery.effective.expand.transpose() * kernel.v * battery.effective.expand;
  return kernel;
}

}  // namespace ordrobust
