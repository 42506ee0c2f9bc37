#pragma once

#include "ordrobust/battery.hpp"
#include "ordrobust/dataset.hpp"
#include "ordrobust/inference.hpp"
#include "ordrobust/reversal.hpp"
#include "ordrobust/scaleuse.hpp"

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

namespace ordrobust {

struct AuditOptions {
  double grid_step = 0.05;  // budget grid for coefficient ranges and p curves
  std::uint64_t seed = 0;
  std::vector<double> significance_thresholds = {0.05, 0.01, 0.001};
};

struct FocalAudit {
  std::string name;
  double beta_identity = 0.0;
  double se_identity = 0.0;
  double p_identity = 1.0;
  bool reversible = false;
  std::optional<CostValue> reversal_cost;
  std::optional<Vec> reversal_labels;
  double p_min = 0.0;
  double p_max = 1.0;
  struct SigCross {
    double pi = 0.05;
    std::string direction;
    bool possible = false;
    double cost = 0.0;
    std::string band;
  };
  std::vector<SigCross> crossings;
  std::vector<double> budget_grid;
  std::vector<double> beta_lo;
  std::vector<double> beta_hi;
  std::vector<double> p_min_curve;
  std::vector<double> p_max_curve;
};

struct RatioAudit {
  std::string numerator;
  std::string denominator;
  bool bounded = false;
  bool near_unbounded = false;
  double lo = 0.0;
  double hi = 0.0;
  double identity_ratio = 0.0;
  std::vector<double> budget_grid;
  std::vector<double> ratio_lo;
  std::vector<double> ratio_hi;
};

struct AuditReport {
  std::string schema = "ordrobust.audit.v1";
  std::string name;
  int n = 0;
  int k = 0;
  int m = 0;
  int dropped_rows = 0;
  std::string estimator;
  std::string se_type;
  double alpha = 2.0;
  std::string alpha_policy;
  double epsilon_gap = 0.0;
  bool empty_categories = false;
  std::vector<FocalAudit> focals;
  std::vector<RatioAudit> ratios;
};

AuditReport run_audit(const Dataset& data, const AnalysisConfig& config,
                      const AuditOptions& options = {});

nlohmann::ordered_json audit_to_json(const AuditReport& report);

struct BatchItem {
  std::string name;
  std::string config_path;
  std::string data_path;
  std::string stratum;  // optional manifest metadata
};

struct BatchManifest {
  std::vector<BatchItem> items;
  double grid_step = 0.01;
};

BatchManifest load_batch_manifest(const std::string& path);

struct BatchResult {
  struct CurvePoint {
    std::string curve;
    std::string stratum;
    double c = 0.0;
    double share = 0.0;
    int n = 0;
    std::string band;
  };
  std::vector<CurvePoint> curve_points;
  nlohmann::ordered_json summary;
  std::vector<AuditReport> audits;
  int failures = 0;
};

BatchResult run_batch(const BatchManifest& manifest, const AuditOptions& options);

CsvTable curves_to_csv(const BatchResult& result);

/// Inverse-SE-weighted meta synthesis over audit reports for a focal pair.
nlohmann::ordered_json run_meta(const std::vector<AuditReport>& audits,
                                const std::string& numerator, const std::string& denominator);

/// Grid-oracle comparison for the optimizer outputs on one dataset (K <= 6).
nlohmann::ordered_json run_oracle_comparison(const Dataset& data, const AnalysisConfig& config,
                                             int resolution);

/// Scale-use estimators over elicitation records per the configured methods.
nlohmann::ordered_json run_scale_use(const std::vector<ElicitationRecord>& records,
                                     const ElicitationConfig& config, std::uint64_t seed);

AuditReport audit_from_json(const nlohmann::json& j);

}  // namespace ordrobust
