#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/dataset.hpp"

#include <string>
#include <vector>

namespace ordrobust {

/// Ground-truth generator: linear latent state, configurable reporting labels.
struct GeneratorSpec {
  struct Covariate {
    enum class Kind { normal, bernoulli };
    std::string name;
    Kind kind = Kind::normal;
    double param = 1.0;  // sd for normal, success probability for bernoulli
  };

  int n = 500;
  int k_categories = 11;
  double l1 = 0.0;
  double range = 10.0;
  double intercept = 5.0;
  Vec beta;  // slope per covariate
  double noise_sd = 1.0;
  /// Heteroskedastic twist: sd_i = noise_sd * (1 + slope * x_i1). A positive
  /// slope plants opposing tail effects and makes the first covariate
  /// reversible.
  double noise_sd_slope = 0.0;
  Vec reporting_labels;  // K values on [l1, l1+range]; empty = linear
  std::vector<Covariate> covariates;
  std::uint64_t seed = 1;
};

GeneratorSpec parse_generator_spec(const nlohmann::json& j);

struct RegressionTruth {
  Vec beta;
  double intercept = 0.0;
  Vec reporting_labels;
  Vec thresholds;  // category assignment thresholds (midpoints)
  double true_cost_fixed2 = 0.0;
};

struct GeneratedRegression {
  Dataset data;
  RegressionTruth truth;
};

GeneratedRegression generate_regression_data(const GeneratorSpec& spec);

enum class ElicitationMethod { linear_prompting, objective_subjective, sliders };

struct ElicitationTruth {
  Vec reporting_labels;
  double true_cost_fixed2 = 0.0;
};

struct GeneratedElicitation {
  std::vector<ElicitationRecord> records;
  ElicitationTruth truth;
};

struct ElicitationOptions {
  int n_per_arm = 1200;
  double slider_noise_sd = 0.02;
  double objective_scale = 4.0;   // objective units per scale unit
  double objective_offset = 150.0;
  enum class Latent { uniform, boundary_comb };
  /// Latent draw scheme (iid either way). boundary_comb concentrates mass in
  /// triangular teeth at the category boundaries (tooth mass proportional to
  /// the boundary's binomial sd, over a uniform floor), which keeps every
  /// boundary quantile sharply identified in recovery studies.
  Latent latent = Latent::uniform;
  double comb_floor_mass = 0.15;
};

GeneratedElicitation generate_elicitation(const GeneratorSpec& spec, ElicitationMethod method,
                                          const ElicitationOptions& options = {});

/// Reporting labels for the named preset shape, endpoints pinned to the scale.
Vec preset_reporting_labels(const std::string& name, int k_categories, double l1, double range);

}  // namespace ordrobust
