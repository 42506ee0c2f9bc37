#include "ordrobust/cost.hpp"

#include <cmath>

namespace ordrobust {

Band band_for(double c, const BandThresholds& thresholds) {
  if (c <= thresholds.plausible) return Band::plausible;
  if (c <= thresholds.marginal) return Band::marginal;
  return Band::implausible;
}

std::string band_name(Band band) {
  switch (band) {
    case Band::plausible: return "plausible";
    case Band::marginal: return "marginal";
    case Band::implausible: return "implausible";
  }
  return "implausible";
}

AlphaPolicy alpha_policy_from_string(const std::string& name) {
  if (name == "fixed2") return AlphaPolicy::fixed2;
  if (name == "log10") return AlphaPolicy::log10;
  throw ValidationError("unknown alpha policy '" + name + "' (expected fixed2|log10)");
}

std::string alpha_policy_name(AlphaPolicy policy) {
  return policy == AlphaPolicy::fixed2 ? "fixed2" : "log10";
}

GapVector equal_gaps(int k_categories, double range) {
  if (k_categories < 2) throw ValidationError("equal_gaps: K must be >= 2");
  GapVector g;
  g.range = range;
  g.w = Vec::Constant(k_categories - 1, range / (k_categories - 1));
  return g;
}

GapVector gaps_from_labels(const Vec& labels) {
  if (labels.size() < 2) throw ValidationError("gaps_from_labels: need at least 2 labels");
  GapVector g;
  g.w = labels.tail(labels.size() - 1) - labels.head(labels.size() - 1);
  g.range = labels(labels.size() - 1) - labels(0);
  return g;
}

Vec labels_from_gaps(const GapVector& gaps, double l1) {
  Vec labels(gaps.w.size() + 1);
  labels(0) = l1;
  for (int k = 0; k < gaps.w.size(); ++k) labels(k + 1) = labels(k) + gaps.w(k);
  return labels;
}

double default_epsilon_gap(int k_categories, double range) {
  return 1e-6 * range / (k_categories - 1);
}

double gap_variance(const Vec& w) {
  const double n = static_cast<double>(w.size());
  const double mean = w.sum() / n;
  return (w.array() - mean).square().sum() / n;
}

double max_var(int k_categories, double range) {
  if (k_categories < 2) throw ValidationError("max_var: K must be >= 2");
  // (1/(K-1) - 1/(K-1)^2) L^2, in the rearranged form that stays exact for
  // integer-valued inputs
  const double km1 = static_cast<double>(k_categories - 1);
  return static_cast<double>(k_categories - 2) * range * range / (km1 * km1);
}

double alpha_for(int k_categories, AlphaPolicy policy) {
  if (policy == AlphaPolicy::fixed2) return 2.0;
  if (k_categories < 3)
    throw ValidationError("alpha_for: log10 policy requires K >= 3");
  return 2.0 * std::log10(static_cast<double>(k_categories - 1));
}

CostValue cost(const GapVector& gaps, double alpha, const BandThresholds& thresholds) {
  if (alpha <= 0.0) throw ValidationError("cost: alpha must be positive");
  CostValue out;
  out.alpha = alpha;
  if (gaps.cuts() < 2) {
    // K = 2: a single gap has zero variance and maxVar = 0.
    out.c = 0.0;
    out.degenerate = true;
    out.band = band_for(0.0, thresholds);
    return out;
  }
  const double mv = max_var(gaps.categories(), gaps.range);
  const double ratio = gap_variance(gaps.w) / mv;
  out.c = std::pow(std::clamp(ratio, 0.0, 1.0), 1.0 / alpha);
  out.band = band_for(out.c, thresholds);
  return out;
}

Mat cost_matrix(int k_categories) {
  const int n = k_categories - 1;
  const double kn = static_cast<double>(n);
  Mat p = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / kn);
  return p / kn;
}

DiscretizeResult discretize(const Vec& continuous, int n_labels, double range) {
  if (n_labels < 2) throw ValidationError("discretize: n_labels must be >= 2");
  const double step = range / (n_labels - 1);
  DiscretizeResult out;
  out.labels = Vec::LinSpaced(n_labels, 0.0, range);
  out.codes.resize(continuous.size());
  for (int i = 0; i < continuous.size(); ++i) {
    const double v = continuous(i);
    if (v < -1e-12 || v > range + 1e-12)
      throw ValidationError("discretize: value outside [0, L]");
    // round half away from zero
    const int cell = static_cast<int>(std::round(v / step));
    out.codes[i] = std::clamp(cell, 0, n_labels - 1) + 1;
  }
  return out;
}

}  // namespace ordrobust
