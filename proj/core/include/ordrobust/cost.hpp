#pragma once

#include "ordrobust/common.hpp"

#include <string>

namespace ordrobust {

/// Plausibility band for a non-linearity cost.
enum class Band { plausible, marginal, implausible };

struct BandThresholds {
  double plausible = 0.15;
  double marginal = 0.30;
};

Band band_for(double c, const BandThresholds& thresholds = {});
std::string band_name(Band band);

struct CostValue {
  double c = 0.0;
  double alpha = 2.0;
  Band band = Band::plausible;
  bool degenerate = false;  // K = 2: maxVar is zero, cost undefined
};

enum class AlphaPolicy { fixed2, log10 };

AlphaPolicy alpha_policy_from_string(const std::string& name);
std::string alpha_policy_name(AlphaPolicy policy);

/// Successive label gaps w_k = l~_{k+1} - l~_k of a monotone relabeling.
/// Feasible relabelings keep sum(w) == range and w_k >= eps_gap; cost
/// evaluation itself only needs nonnegative gaps (the single-jump limit has
/// zero gaps).
struct GapVector {
  Vec w;
  double range = 0.0;  // l_K - l_1

  int cuts() const { return static_cast<int>(w.size()); }
  int categories() const { return cuts() + 1; }
};

GapVector equal_gaps(int k_categories, double range);
GapVector gaps_from_labels(const Vec& labels);
Vec labels_from_gaps(const GapVector& gaps, double l1);

/// Default strict-monotonicity floor: 1e-6 * L / (K-1).
double default_epsilon_gap(int k_categories, double range);

/// Population variance of the gaps (denominator K-1 over the K-1 gaps).
double gap_variance(const Vec& w);

/// maxVar(K, L) = (1/(K-1) - 1/(K-1)^2) * L^2; zero for K = 2.
double max_var(int k_categories, double range);

/// alpha for the configured policy; log10 policy requires K >= 3.
double alpha_for(int k_categories, AlphaPolicy policy);

/// C_alpha = (Var(w)/maxVar)^(1/alpha), in [0, 1].
CostValue cost(const GapVector& gaps, double alpha, const BandThresholds& thresholds = {});

/// Quadratic form P with Var(w) = w'Pw on the slice sum(w) = L:
/// P = (1/(K-1)) (I - (1/(K-1)) 11').
Mat cost_matrix(int k_categories);

struct DiscretizeResult {
  IVec codes;     // 1..n_labels
  Vec labels;     // the n_labels grid values
};

/// Rounds values in [0, L] to the nearest multiple of L/(n_labels-1); exact
/// halves round away from zero.
DiscretizeResult discretize(const Vec& continuous, int n_labels, double range);

}  // namespace ordrobust
