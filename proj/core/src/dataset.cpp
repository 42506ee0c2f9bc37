#include "ordrobust/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ordrobust {

using nlohmann::json;

SeType se_type_from_string(const std::string& name) {
  if (name == "homoskedastic") return SeType::homoskedastic;
  if (name == "robust") return SeType::robust;
  if (name == "clustered") return SeType::clustered;
  throw ValidationError("unknown se_type '" + name +
                        "' (expected homoskedastic|robust|clustered)");
}

std::string se_type_name(SeType se) {
  switch (se) {
    case SeType::homoskedastic: return "homoskedastic";
    case SeType::robust: return "robust";
    case SeType::clustered: return "clustered";
  }
  return "robust";
}

std::vector<int> OrdinalOutcome::category_counts() const {
  std::vector<int> counts(categories(), 0);
  for (const int c : codes) counts[c - 1]++;
  return counts;
}

bool OrdinalOutcome::has_empty_category() const {
  for (const int c : category_counts())
    if (c == 0) return true;
  return false;
}

Vec OrdinalOutcome::values() const {
  Vec v(codes.size());
  for (std::size_t i = 0; i < codes.size(); ++i) v(i) = labels(codes[i] - 1);
  return v;
}

int DesignSpec::column(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  return -1;
}

namespace {

Vec labels_from_json(const json& j) {
  if (!j.is_array() || j.size() < 2)
    throw ValidationError("config: 'labels' must be an array of at least 2 values");
  Vec labels(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) labels(i) = j[i].get<double>();
  for (int i = 1; i < labels.size(); ++i)
    if (!(labels(i) > labels(i - 1)))
      throw ValidationError("config: label coding must be strictly increasing");
  return labels;
}

}  // namespace

AnalysisConfig parse_analysis_config(const json& j) {
  AnalysisConfig cfg;
  if (!j.contains("outcome")) throw ValidationError("config: missing 'outcome'");
  cfg.outcome = j.at("outcome").get<std::string>();
  if (!j.contains("labels")) throw ValidationError("config: missing 'labels'");
  cfg.labels = labels_from_json(j.at("labels"));

  if (j.contains("covariates")) {
    for (const auto& c : j.at("covariates")) {
      AnalysisConfig::Covariate cov;
      cov.name = c.at("name").get<std::string>();
      const std::string type = c.value("type", "numeric");
      if (type == "categorical") {
        cov.categorical = true;
        cov.reference = c.value("reference", "");
      } else if (type != "numeric") {
        throw ValidationError("config: covariate type must be numeric|categorical");
      }
      cfg.covariates.push_back(cov);
    }
  }
  cfg.intercept = j.value("intercept", true);
  cfg.unit_id = j.value("unit_id", "");
  cfg.cluster_id = j.value("cluster_id", "");
  if (j.contains("instruments")) {
    for (const auto& inst : j.at("instruments")) {
      AnalysisConfig::Instrument iv;
      iv.endogenous = inst.at("for").get<std::string>();
      iv.instrument = inst.at("name").get<std::string>();
      cfg.instruments.push_back(iv);
    }
  }
  if (j.contains("focal")) {
    for (const auto& f : j.at("focal")) cfg.focal.push_back(f.get<std::string>());
  }
  if (cfg.focal.empty()) throw ValidationError("config: 'focal' must name at least one coefficient");
  cfg.se_type = se_type_from_string(j.value("se_type", "robust"));
  cfg.alpha_policy = alpha_policy_from_string(j.value("alpha_policy", "fixed2"));
  if (j.contains("epsilon_gap")) {
    const double eps = j.at("epsilon_gap").get<double>();
    if (eps <= 0.0) throw ValidationError("config: epsilon_gap must be positive");
    cfg.epsilon_gap = eps;
  }
  if (j.contains("bands")) {
    cfg.bands.plausible = j.at("bands").value("plausible", 0.15);
    cfg.bands.marginal = j.at("bands").value("marginal", 0.30);
  }
  if (j.contains("ratio_pairs")) {
    for (const auto& p : j.at("ratio_pairs")) {
      cfg.ratio_pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
    }
  }
  cfg.standardize_outcome = j.value("standardize_outcome", false);
  return cfg;
}

AnalysisConfig load_analysis_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config JSON parse error: ") + e.what());
  }
  return parse_analysis_config(j);
}

namespace {

struct RawColumn {
  std::string name;
  bool categorical = false;
  std::string reference;
  int csv_index = -1;
};

int match_label(const Vec& labels, double value) {
  for (int k = 0; k < labels.size(); ++k) {
    if (std::fabs(value - labels(k)) <= 1e-9 * std::max(1.0, std::fabs(labels(k))))
      return k + 1;
  }
  return -1;
}

IVec densify(const std::vector<std::string>& raw) {
  std::map<std::string, int> ids;
  IVec out;
  out.reserve(raw.size());
  for (const auto& v : raw) {
    auto [it, inserted] = ids.try_emplace(v, static_cast<int>(ids.size()));
    out.push_back(it->second);
  }
  return out;
}

}  // namespace

Dataset build_dataset(const CsvTable& table, const AnalysisConfig& config) {
  const int outcome_col = table.require_column(config.outcome);

  std::vector<RawColumn> raw_covs;
  for (const auto& cov : config.covariates) {
    RawColumn rc;
    rc.name = cov.name;
    rc.categorical = cov.categorical;
    rc.reference = cov.reference;
    rc.csv_index = table.require_column(cov.name);
    raw_covs.push_back(rc);
  }
  const int unit_col = config.unit_id.empty() ? -1 : table.require_column(config.unit_id);
  const int cluster_col = config.cluster_id.empty() ? -1 : table.require_column(config.cluster_id);

  std::vector<int> instrument_cols;
  for (const auto& iv : config.instruments)
    instrument_cols.push_back(table.require_column(iv.instrument));

  // Listwise deletion over the used columns only.
  std::vector<int> kept;
  int dropped = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    bool complete = !cell_missing(row[outcome_col]);
    for (const auto& rc : raw_covs) complete = complete && !cell_missing(row[rc.csv_index]);
    for (const int c : instrument_cols) complete = complete && !cell_missing(row[c]);
    if (unit_col >= 0) complete = complete && !cell_missing(row[unit_col]);
    if (cluster_col >= 0) complete = complete && !cell_missing(row[cluster_col]);
    if (complete) {
      kept.push_back(static_cast<int>(r));
    } else {
      ++dropped;
    }
  }
  const int n = static_cast<int>(kept.size());

  Dataset data;
  data.dropped_rows = dropped;
  data.outcome.labels = config.labels;
  data.outcome.codes.reserve(n);
  for (const int r : kept) {
    const double v = parse_double(table.rows[r][outcome_col], "outcome column");
    const int code = match_label(config.labels, v);
    if (code < 0) {
      throw ValidationError("outcome value " + table.rows[r][outcome_col] +
                            " is outside the declared label set (code out of range)");
    }
    data.outcome.codes.push_back(code);
  }

  // Expand columns: intercept, then per-config covariates (categoricals become
  // indicator blocks against a named reference level).
  DesignSpec& design = data.design;
  design.intercept = config.intercept;
  std::vector<Vec> columns;
  if (config.intercept) {
    design.names.push_back("(Intercept)");
    columns.push_back(Vec::Ones(n));
  }
  for (const auto& rc : raw_covs) {
    if (!rc.categorical) {
      Vec col(n);
      for (int i = 0; i < n; ++i)
        col(i) = parse_double(table.rows[kept[i]][rc.csv_index], "covariate " + rc.name);
      design.names.push_back(rc.name);
      columns.push_back(col);
      continue;
    }
    std::set<std::string> levels;
    for (const int r : kept) levels.insert(table.rows[r][rc.csv_index]);
    if (levels.size() < 2)
      throw ValidationError("categorical covariate '" + rc.name + "' has a single level");
    std::string reference = rc.reference;
    if (reference.empty()) {
      reference = *levels.begin();  // lexicographically smallest
    } else if (!levels.count(reference)) {
      throw ValidationError("reference level '" + reference + "' not present in '" + rc.name + "'");
    }
    for (const auto& level : levels) {
      if (level == reference) continue;
      Vec col(n);
      for (int i = 0; i < n; ++i)
        col(i) = table.rows[kept[i]][rc.csv_index] == level ? 1.0 : 0.0;
      design.names.push_back(rc.name + "=" + level);
      columns.push_back(col);
    }
  }

  const int m = static_cast<int>(columns.size());
  if (m == 0) throw ValidationError("design has no columns");
  if (n < m + 2)
    throw ValidationError("fewer than M+2 complete rows (N=" + std::to_string(n) +
                          ", M=" + std::to_string(m) + ")");
  design.x.resize(n, m);
  for (int c = 0; c < m; ++c) design.x.col(c) = columns[c];

  // Constant non-intercept columns are always a configuration error.
  for (int c = config.intercept ? 1 : 0; c < m; ++c) {
    const double lo = design.x.col(c).minCoeff();
    const double hi = design.x.col(c).maxCoeff();
    if (hi - lo <= 0.0)
      throw ValidationError("covariate column '" + design.names[c] + "' is constant");
  }

  if (unit_col >= 0) {
    std::vector<std::string> raw;
    raw.reserve(n);
    for (const int r : kept) raw.push_back(table.rows[r][unit_col]);
    design.unit_ids = densify(raw);
  }
  if (cluster_col >= 0) {
    std::vector<std::string> raw;
    raw.reserve(n);
    for (const int r : kept) raw.push_back(table.rows[r][cluster_col]);
    design.cluster_ids = densify(raw);
  }

  if (!config.instruments.empty()) {
    // Just-identified: Z equals X with each endogenous column replaced.
    design.z = design.x;
    for (std::size_t i = 0; i < config.instruments.size(); ++i) {
      const auto& iv = config.instruments[i];
      const int endo = design.column(iv.endogenous);
      if (endo < 0)
        throw ValidationError("instrumented covariate '" + iv.endogenous + "' is not in the design");
      Vec col(n);
      for (int r = 0; r < n; ++r)
        col(r) = parse_double(table.rows[kept[r]][instrument_cols[i]],
                              "instrument " + iv.instrument);
      design.z.col(endo) = col;
    }
  }

  design.focal = config.focal;
  for (const auto& f : design.focal) {
    if (design.column(f) < 0)
      throw ValidationError("focal coefficient '" + f + "' is not a design column");
    if (config.intercept && f == "(Intercept)")
      throw ValidationError("the intercept cannot be a focal coefficient");
  }

  if (config.standardize_outcome) {
    // Affine relabeling: the coded outcome gets mean 0 and sd 1.
    Vec values = data.outcome.values();
    const double mean = values.mean();
    const double sd = std::sqrt((values.array() - mean).square().sum() /
                                std::max(1, static_cast<int>(values.size()) - 1));
    if (sd <= 0.0) throw ValidationError("cannot standardize a constant outcome");
    data.outcome.labels = (data.outcome.labels.array() - mean) / sd;
  }

  return data;
}

Dataset load_dataset(const std::string& csv_path, const AnalysisConfig& config) {
  return build_dataset(read_csv(csv_path), config);
}

CsvTable dataset_to_csv(const Dataset& data) {
  CsvTable table;
  table.header.push_back("outcome");
  const bool skip_intercept = data.design.intercept;
  for (std::size_t c = skip_intercept ? 1 : 0; c < data.design.names.size(); ++c)
    table.header.push_back(data.design.names[c]);
  if (!data.design.unit_ids.empty()) table.header.push_back("unit_id");
  if (!data.design.cluster_ids.empty()) table.header.push_back("cluster_id");

  const int n = data.design.n();
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row;
    row.push_back(format_double(data.outcome.labels(data.outcome.codes[i] - 1)));
    for (int c = skip_intercept ? 1 : 0; c < data.design.m(); ++c)
      row.push_back(format_double(data.design.x(i, c)));
    if (!data.design.unit_ids.empty()) row.push_back(std::to_string(data.design.unit_ids[i]));
    if (!data.design.cluster_ids.empty())
      row.push_back(std::to_string(data.design.cluster_ids[i]));
    table.rows.push_back(std::move(row));
  }
  return table;
}

ElicitationConfig parse_elicitation_config(const json& j) {
  ElicitationConfig cfg;
  if (!j.contains("labels")) throw ValidationError("elicitation config: missing 'labels'");
  cfg.labels = labels_from_json(j.at("labels"));
  cfg.arm = j.value("arm", "");
  cfg.discrete = j.value("discrete", "");
  cfg.continuous = j.value("continuous", "");
  if (j.contains("sliders")) {
    for (const auto& s : j.at("sliders")) cfg.sliders.push_back(s.get<std::string>());
  }
  cfg.objective = j.value("objective", "");
  cfg.n_boot = j.value("n_boot", 500);
  if (j.contains("methods")) {
    for (const auto& m : j.at("methods")) cfg.methods.push_back(m.get<std::string>());
  }
  cfg.alpha_policy = alpha_policy_from_string(j.value("alpha_policy", "fixed2"));
  return cfg;
}

ElicitationConfig load_elicitation_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config JSON parse error: ") + e.what());
  }
  return parse_elicitation_config(j);
}

std::vector<ElicitationRecord> build_elicitation(const CsvTable& table,
                                                 const ElicitationConfig& config) {
  const int k = static_cast<int>(config.labels.size());
  const double lo = config.labels(0);
  const double hi = config.labels(k - 1);

  const int arm_col = config.arm.empty() ? -1 : table.require_column(config.arm);
  const int disc_col = config.discrete.empty() ? -1 : table.require_column(config.discrete);
  const int cont_col = config.continuous.empty() ? -1 : table.require_column(config.continuous);
  const int obj_col = config.objective.empty() ? -1 : table.require_column(config.objective);
  std::vector<int> slider_cols;
  for (const auto& s : config.sliders) slider_cols.push_back(table.require_column(s));
  if (!slider_cols.empty() && static_cast<int>(slider_cols.size()) != k)
    throw ValidationError("slider column count " + std::to_string(slider_cols.size()) +
                          " does not match K=" + std::to_string(k));

  std::vector<ElicitationRecord> records;
  records.reserve(table.rows.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ElicitationRecord rec;
    if (arm_col >= 0) {
      const std::string& arm = row[arm_col];
      if (arm == "unprompted") {
        rec.arm = ElicitationArm::unprompted;
      } else if (arm == "linear_prompted") {
        rec.arm = ElicitationArm::linear_prompted;
      } else {
        throw ValidationError("row " + std::to_string(r + 2) + ": unknown arm '" + arm +
                              "' (expected unprompted|linear_prompted)");
      }
    }
    if (disc_col >= 0 && !cell_missing(row[disc_col])) {
      const double v = parse_double(row[disc_col], "discrete response");
      const int point = static_cast<int>(std::llround(v));
      if (std::fabs(v - point) > 1e-9 || point < 0 || point >= k)
        throw ValidationError("row " + std::to_string(r + 2) +
                              ": discrete response must be an integer scale point 0.." +
                              std::to_string(k - 1));
      rec.discrete_response = point;
    }
    if (cont_col >= 0 && !cell_missing(row[cont_col])) {
      const double v = parse_double(row[cont_col], "continuous response");
      if (v < lo - 1e-9 || v > hi + 1e-9)
        throw ValidationError("row " + std::to_string(r + 2) +
                              ": continuous response outside [l_1, l_K]");
      rec.continuous_response = v;
    }
    if (!slider_cols.empty()) {
      bool any = false;
      Vec pos(k);
      for (int c = 0; c < k; ++c) {
        if (cell_missing(row[slider_cols[c]])) {
          any = false;
          break;
        }
        pos(c) = parse_double(row[slider_cols[c]], "slider position");
        any = true;
      }
      if (any) rec.slider_positions = pos;
    }
    if (obj_col >= 0 && !cell_missing(row[obj_col]))
      rec.objective_value = parse_double(row[obj_col], "objective value");

    if (!rec.discrete_response && !rec.continuous_response && !rec.slider_positions &&
        !rec.objective_value) {
      throw ValidationError("row " + std::to_string(r + 2) +
                            ": no discrete/continuous/slider/objective value present");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ElicitationRecord> load_elicitation(const std::string& csv_path,
                                                const ElicitationConfig& config) {
  return build_elicitation(read_csv(csv_path), config);
}

}  // namespace ordrobust
