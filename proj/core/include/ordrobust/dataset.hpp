#pragma once

#include "ordrobust/common.hpp"
#include "ordrobust/cost.hpp"
#include "ordrobust/csv.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace ordrobust {

enum class SeType { homoskedastic, robust, clustered };
SeType se_type_from_string(const std::string& name);
std::string se_type_name(SeType se);

struct OrdinalOutcome {
  IVec codes;   // 1..K
  Vec labels;   // K strictly increasing values (original coding)

  int categories() const { return static_cast<int>(labels.size()); }
  double range() const { return labels(labels.size() - 1) - labels(0); }
  std::vector<int> category_counts() const;
  bool has_empty_category() const;
  /// Observed outcome values on the original coding.
  Vec values() const;
};

struct DesignSpec {
  std::vector<std::string> names;  // M column names, intercept first when present
  Mat x;                           // N x M
  bool intercept = true;
  IVec unit_ids;     // dense 0..U-1, empty when unused
  IVec cluster_ids;  // dense 0..G-1, empty when unused
  Mat z;             // N x M instrument-side matrix for 2SLS, 0x0 otherwise
  std::vector<std::string> focal;

  int n() const { return static_cast<int>(x.rows()); }
  int m() const { return static_cast<int>(x.cols()); }
  bool has_instruments() const { return z.size() > 0; }
  int column(const std::string& name) const;  // -1 when absent
};

struct Dataset {
  OrdinalOutcome outcome;
  DesignSpec design;
  int dropped_rows = 0;
};

struct AnalysisConfig {
  struct Covariate {
    std::string name;
    bool categorical = false;
    std::string reference;  // empty: lexicographically smallest level
  };
  struct Instrument {
    std::string endogenous;
    std::string instrument;
  };

  std::string outcome;
  Vec labels;
  std::vector<Covariate> covariates;
  bool intercept = true;
  std::string unit_id;
  std::string cluster_id;
  std::vector<Instrument> instruments;
  std::vector<std::string> focal;
  SeType se_type = SeType::robust;
  AlphaPolicy alpha_policy = AlphaPolicy::fixed2;
  std::optional<double> epsilon_gap;
  BandThresholds bands;
  std::vector<std::pair<std::string, std::string>> ratio_pairs;
  bool standardize_outcome = false;
};

AnalysisConfig parse_analysis_config(const nlohmann::json& j);
AnalysisConfig load_analysis_config(const std::string& path);

Dataset load_dataset(const std::string& csv_path, const AnalysisConfig& config);
Dataset build_dataset(const CsvTable& table, const AnalysisConfig& config);

/// Writes outcome (original coding), covariates, and id columns; reloading
/// with the matching expanded config reproduces the dataset bit-for-bit.
CsvTable dataset_to_csv(const Dataset& data);

enum class ElicitationArm { unprompted, linear_prompted };

struct ElicitationRecord {
  ElicitationArm arm = ElicitationArm::unprompted;
  std::optional<int> discrete_response;      // scale points 0..K-1
  std::optional<double> continuous_response; // in [l_1, l_K]
  std::optional<Vec> slider_positions;       // length K, raw (may violate monotonicity)
  std::optional<double> objective_value;
};

struct ElicitationConfig {
  Vec labels;  // K declared scale labels
  std::string arm;
  std::string discrete;
  std::string continuous;
  std::vector<std::string> sliders;
  std::string objective;
  int n_boot = 500;
  std::vector<std::string> methods;  // subset of the scale-use estimators
  AlphaPolicy alpha_policy = AlphaPolicy::fixed2;
};

ElicitationConfig parse_elicitation_config(const nlohmann::json& j);
ElicitationConfig load_elicitation_config(const std::string& path);

std::vector<ElicitationRecord> load_elicitation(const std::string& csv_path,
                                                const ElicitationConfig& config);
std::vector<ElicitationRecord> build_elicitation(const CsvTable& table,
                                                 const ElicitationConfig& config);

}  // namespace ordrobust
