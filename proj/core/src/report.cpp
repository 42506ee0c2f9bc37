#include "ordrobust/report.hpp"

#include "ordrobust/grid.hpp"
#include "ordrobust/mathutil.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

namespace ordrobust {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::vector<double> budget_grid(double step) {
  std::vector<double> grid;
  const int n = static_cast<int>(std::round(1.0 / step));
  for (int i = 0; i <= n; ++i) grid.push_back(std::min(1.0, i * step));
  return grid;
}

std::string significance_class(double p) {
  if (p <= 0.001) return "p<=0.001";
  if (p <= 0.01) return "p<=0.01";
  if (p <= 0.05) return "p<=0.05";
  if (p <= 0.1) return "p<=0.1";
  return "p>0.1";
}

json vec_to_json(const Vec& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vec vec_from_json(const json& arr) {
  Vec v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v(i) = arr[i].get<double>();
  return v;
}

}  // namespace

AuditReport run_audit(const Dataset& data, const AnalysisConfig& config,
                      const AuditOptions& options) {
  const DichotomizedBattery battery = fit_battery(data);

  AuditReport report;
  report.n = battery.n;
  report.k = battery.k_categories;
  report.m = battery.m;
  report.dropped_rows = data.dropped_rows;
  report.estimator = estimator_name(battery.estimator);
  report.se_type = se_type_name(config.se_type);
  report.alpha = alpha_for(battery.k_categories, config.alpha_policy);
  report.alpha_policy = alpha_policy_name(config.alpha_policy);
  report.epsilon_gap = config.epsilon_gap
                           ? *config.epsilon_gap
                           : default_epsilon_gap(battery.k_categories, battery.range());
  report.empty_categories = data.outcome.has_empty_category();

  ReversalOptions rev_opts;
  rev_opts.alpha = report.alpha;
  rev_opts.epsilon_gap = report.epsilon_gap;
  rev_opts.bands = config.bands;

  const std::vector<double> grid = budget_grid(options.grid_step);
  const GapVector identity = battery.identity_gaps();

  for (const std::string& focal : config.focal) {
    FocalAudit fa;
    fa.name = focal;
    const CoefficientKernel kernel = build_kernel(battery, focal, config.se_type);
    fa.beta_identity = recompose_beta(battery, identity, focal);
    fa.se_identity = std::sqrt(kernel.variance(identity));
    fa.p_identity = p_value(kernel, identity);

    const ReversalReport rev = min_cost_sign_reversal(battery, focal, rev_opts);
    fa.reversible = rev.reversible;
    if (rev.min_cost) {
      fa.reversal_cost = rev.min_cost;
      if (rev.argmin_gaps)
        fa.reversal_labels = labels_from_gaps(*rev.argmin_gaps, battery.labels(0));
    }

    const PBounds pb = p_bounds(kernel, rev_opts);
    fa.p_min = pb.p_min;
    fa.p_max = pb.p_max;

    for (const double pi : options.significance_thresholds) {
      FocalAudit::SigCross cross;
      cross.pi = pi;
      const CrossDirection dir =
          fa.p_identity <= pi ? CrossDirection::lose : CrossDirection::gain;
      cross.direction = dir == CrossDirection::lose ? "lose" : "gain";
      const SignificanceReport sig = min_cost_significance_reversal(kernel, pi, dir, rev_opts);
      cross.possible = sig.crossing.has_value();
      if (sig.crossing) {
        cross.cost = sig.crossing->min_cost.c;
        cross.band = band_name(sig.crossing->min_cost.band);
      }
      fa.crossings.push_back(cross);
    }

    fa.budget_grid = grid;
    std::vector<Vec> warm;
    for (const double c : grid) {
      const RangeAtBudget range = beta_range_at_budget(battery, focal, c, rev_opts);
      fa.beta_lo.push_back(range.lo);
      fa.beta_hi.push_back(range.hi);
      Vec arg;
      const BudgetedPBounds bpb = p_bounds_at_budget(kernel, c, rev_opts, warm, &arg);
      fa.p_min_curve.push_back(bpb.p_min);
      fa.p_max_curve.push_back(bpb.p_max);
      warm.assign(1, arg);  // nested budgets keep the previous argmin feasible
    }
    report.focals.push_back(std::move(fa));
  }

  for (const auto& [num, den] : config.ratio_pairs) {
    RatioAudit ra;
    ra.numerator = num;
    ra.denominator = den;
    const RatioBounds rb = ratio_bounds(battery, num, den);
    ra.bounded = rb.bounded;
    ra.near_unbounded = rb.near_unbounded;
    ra.lo = rb.lo;
    ra.hi = rb.hi;
    const double den_identity = recompose_beta(battery, identity, den);
    ra.identity_ratio = recompose_beta(battery, identity, num) / den_identity;
    if (rb.bounded) {
      ra.budget_grid = grid;
      for (const double c : grid) {
        const RangeAtBudget rr = ratio_range_at_budget(battery, num, den, c, rev_opts);
        ra.ratio_lo.push_back(rr.lo);
        ra.ratio_hi.push_back(rr.hi);
      }
    }
    report.ratios.push_back(std::move(ra));
  }
  return report;
}

ordered_json audit_to_json(const AuditReport& report) {
  ordered_json j;
  j["schema"] = report.schema;
  j["name"] = report.name;
  j["n"] = report.n;
  j["k"] = report.k;
  j["m"] = report.m;
  j["dropped_rows"] = report.dropped_rows;
  j["estimator"] = report.estimator;
  j["se_type"] = report.se_type;
  j["alpha"] = report.alpha;
  j["alpha_policy"] = report.alpha_policy;
  j["epsilon_gap"] = report.epsilon_gap;
  j["empty_categories"] = report.empty_categories;
  j["focals"] = ordered_json::array();
  for (const FocalAudit& fa : report.focals) {
    ordered_json f;
    f["name"] = fa.name;
    f["beta_identity"] = fa.beta_identity;
    f["se_identity"] = fa.se_identity;
    f["p_identity"] = fa.p_identity;
    f["reversible"] = fa.reversible;
    if (fa.reversal_cost) {
      f["reversal_cost"] = fa.reversal_cost->c;
      f["reversal_band"] = band_name(fa.reversal_cost->band);
      if (fa.reversal_labels) f["reversal_labels"] = vec_to_json(*fa.reversal_labels);
    }
    f["p_min"] = fa.p_min;
    f["p_max"] = fa.p_max;
    f["significance_crossings"] = ordered_json::array();
    for (const auto& cross : fa.crossings) {
      ordered_json c;
      c["pi"] = cross.pi;
      c["direction"] = cross.direction;
      c["possible"] = cross.possible;
      if (cross.possible) {
        c["cost"] = cross.cost;
        c["band"] = cross.band;
      }
      f["significance_crossings"].push_back(c);
    }
    f["budget_grid"] = fa.budget_grid;
    f["beta_lo"] = fa.beta_lo;
    f["beta_hi"] = fa.beta_hi;
    f["p_min_curve"] = fa.p_min_curve;
    f["p_max_curve"] = fa.p_max_curve;
    j["focals"].push_back(f);
  }
  j["ratios"] = ordered_json::array();
  for (const RatioAudit& ra : report.ratios) {
    ordered_json r;
    r["numerator"] = ra.numerator;
    r["denominator"] = ra.denominator;
    r["bounded"] = ra.bounded;
    r["near_unbounded"] = ra.near_unbounded;
    r["identity_ratio"] = ra.identity_ratio;
    if (ra.bounded) {
      r["lo"] = ra.lo;
      r["hi"] = ra.hi;
      r["budget_grid"] = ra.budget_grid;
      r["ratio_lo"] = ra.ratio_lo;
      r["ratio_hi"] = ra.ratio_hi;
    }
    j["ratios"].push_back(r);
  }
  return j;
}

AuditReport audit_from_json(const json& j) {
  AuditReport report;
  report.schema = j.value("schema", "");
  if (report.schema != "ordrobust.audit.v1")
    throw ValidationError("unsupported audit schema '" + report.schema + "'");
  report.name = j.value("name", "");
  report.n = j.value("n", 0);
  report.k = j.value("k", 0);
  report.m = j.value("m", 0);
  report.dropped_rows = j.value("dropped_rows", 0);
  report.estimator = j.value("estimator", "");
  report.se_type = j.value("se_type", "");
  report.alpha = j.value("alpha", 2.0);
  report.alpha_policy = j.value("alpha_policy", "fixed2");
  report.epsilon_gap = j.value("epsilon_gap", 0.0);
  report.empty_categories = j.value("empty_categories", false);
  for (const auto& f : j.at("focals")) {
    FocalAudit fa;
    fa.name = f.at("name").get<std::string>();
    fa.beta_identity = f.at("beta_identity").get<double>();
    fa.se_identity = f.at("se_identity").get<double>();
    fa.p_identity = f.at("p_identity").get<double>();
    fa.reversible = f.at("reversible").get<bool>();
    if (f.contains("reversal_cost")) {
      CostValue cv;
      cv.c = f.at("reversal_cost").get<double>();
      cv.alpha = report.alpha;
      cv.band = band_for(cv.c);
      fa.reversal_cost = cv;
      if (f.contains("reversal_labels")) fa.reversal_labels = vec_from_json(f.at("reversal_labels"));
    }
    fa.p_min = f.at("p_min").get<double>();
    fa.p_max = f.at("p_max").get<double>();
    for (const auto& c : f.at("significance_crossings")) {
      FocalAudit::SigCross cross;
      cross.pi = c.at("pi").get<double>();
      cross.direction = c.at("direction").get<std::string>();
      cross.possible = c.at("possible").get<bool>();
      if (cross.possible) {
        cross.cost = c.at("cost").get<double>();
        cross.band = c.value("band", "");
      }
      fa.crossings.push_back(cross);
    }
    fa.budget_grid = f.at("budget_grid").get<std::vector<double>>();
    fa.beta_lo = f.at("beta_lo").get<std::vector<double>>();
    fa.beta_hi = f.at("beta_hi").get<std::vector<double>>();
    fa.p_min_curve = f.at("p_min_curve").get<std::vector<double>>();
    fa.p_max_curve = f.at("p_max_curve").get<std::vector<double>>();
    report.focals.push_back(std::move(fa));
  }
  if (j.contains("ratios")) {
    for (const auto& r : j.at("ratios")) {
      RatioAudit ra;
      ra.numerator = r.at("numerator").get<std::string>();
      ra.denominator = r.at("denominator").get<std::string>();
      ra.bounded = r.at("bounded").get<bool>();
      ra.near_unbounded = r.value("near_unbounded", false);
      ra.identity_ratio = r.at("identity_ratio").get<double>();
      if (ra.bounded) {
        ra.lo = r.at("lo").get<double>();
        ra.hi = r.at("hi").get<double>();
        ra.budget_grid = r.at("budget_grid").get<std::vector<double>>();
        ra.ratio_lo = r.at("ratio_lo").get<std::vector<double>>();
        ra.ratio_hi = r.at("ratio_hi").get<std::vector<double>>();
      }
      report.ratios.push_back(std::move(ra));
    }
  }
  return report;
}

BatchManifest load_batch_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open manifest '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("manifest JSON parse error: ") + e.what());
  }
  BatchManifest manifest;
  manifest.grid_step = j.value("grid_step", 0.01);
  const auto base = std::filesystem::path(path).parent_path();
  if (!j.contains("items") || j.at("items").empty())
    throw ValidationError("manifest must list at least one item");
  for (const auto& item : j.at("items")) {
    BatchItem bi;
    bi.name = item.value("name", "item" + std::to_string(manifest.items.size()));
    bi.config_path = (base / item.at("config").get<std::string>()).string();
    bi.data_path = (base / item.at("data").get<std::string>()).string();
    bi.stratum = item.value("stratum", "");
    manifest.items.push_back(bi);
  }
  return manifest;
}

BatchResult run_batch(const BatchManifest& manifest, const AuditOptions& options) {
  const int n_items = static_cast<int>(manifest.items.size());
  std::vector<std::optional<AuditReport>> audits(n_items);
  std::vector<std::string> errors(n_items);

  parallel_for(n_items, [&](int i) {
    try {
      const AnalysisConfig config = load_analysis_config(manifest.items[i].config_path);
      const Dataset data = load_dataset(manifest.items[i].data_path, config);
      AuditOptions opts = options;
      AuditReport report = run_audit(data, config, opts);
      report.name = manifest.items[i].name;
      audits[i] = std::move(report);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  });

  BatchResult result;
  ordered_json items = ordered_json::array();
  int n_focals = 0;
  int n_reversible = 0;
  for (int i = 0; i < n_items; ++i) {
    ordered_json item;
    item["name"] = manifest.items[i].name;
    if (audits[i]) {
      item["status"] = "ok";
      item["focals"] = static_cast<int>(audits[i]->focals.size());
      result.audits.push_back(*audits[i]);
      n_focals += static_cast<int>(audits[i]->focals.size());
      for (const auto& fa : audits[i]->focals) n_reversible += fa.reversible ? 1 : 0;
    } else {
      item["status"] = "error";
      item["error"] = errors[i];
      ++result.failures;
    }
    items.push_back(item);
  }
  if (result.audits.empty()) throw ValidationError("batch: every item failed");

  // Cumulative shares over the cost grid, stratified by significance class.
  struct FocalSummary {
    std::string stratum;
    bool reversible = false;
    double reversal_cost = 2.0;  // above any budget when absent
    bool sig_possible = false;
    double sig_cost = 2.0;
  };
  std::vector<FocalSummary> focals;
  for (const auto& audit : result.audits) {
    for (const auto& fa : audit.focals) {
      FocalSummary fs;
      fs.stratum = significance_class(fa.p_identity);
      fs.reversible = fa.reversible;
      if (fa.reversal_cost) fs.reversal_cost = fa.reversal_cost->c;
      for (const auto& cross : fa.crossings) {
        if (cross.pi == 0.05) {
          fs.sig_possible = cross.possible;
          if (cross.possible) fs.sig_cost = cross.cost;
        }
      }
      focals.push_back(fs);
    }
  }

  const std::vector<std::string> strata = {"all",     "p<=0.001", "p<=0.01",
                                           "p<=0.05", "p<=0.1",   "p>0.1"};
  const std::vector<double> grid = budget_grid(manifest.grid_step);
  for (const std::string& curve : {std::string("sign_reversal"), std::string("significance_reversal")}) {
    for (const std::string& stratum : strata) {
      std::vector<const FocalSummary*> members;
      for (const auto& fs : focals) {
        if (stratum == "all" || fs.stratum == stratum) members.push_back(&fs);
      }
      if (members.empty()) continue;
      for (const double c : grid) {
        int count = 0;
        for (const FocalSummary* fs : members) {
          const bool hit = curve == "sign_reversal"
                               ? (fs->reversible && fs->reversal_cost <= c + 1e-12)
                               : (fs->sig_possible && fs->sig_cost <= c + 1e-12);
          count += hit ? 1 : 0;
        }
        BatchResult::CurvePoint pt;
        pt.curve = curve;
        pt.stratum = stratum;
        pt.c = c;
        pt.share = static_cast<double>(count) / members.size();
        pt.n = static_cast<int>(members.size());
        pt.band = band_name(band_for(c));
        result.curve_points.push_back(pt);
      }
    }
  }

  ordered_json summary;
  summary["schema"] = "ordrobust.batch.v1";
  summary["items"] = items;
  summary["n_items"] = n_items;
  summary["n_failures"] = result.failures;
  summary["n_focals"] = n_focals;
  summary["reversible_share"] =
      n_focals > 0 ? static_cast<double>(n_reversible) / n_focals : 0.0;
  summary["grid_step"] = manifest.grid_step;
  result.summary = summary;
  return result;
}

CsvTable curves_to_csv(const BatchResult& result) {
  CsvTable table;
  table.header = {"c", "share", "n", "stratum", "band", "curve"};
  for (const auto& pt : result.curve_points) {
    table.rows.push_back({format_double(pt.c), format_double(pt.share), std::to_string(pt.n),
                          pt.stratum, pt.band, pt.curve});
  }
  return table;
}

ordered_json run_meta(const std::vector<AuditReport>& audits, const std::string& numerator,
                      const std::string& denominator) {
  if (audits.empty()) throw ValidationError("meta: no audits supplied");

  struct Entry {
    const AuditReport* audit;
    const FocalAudit* num;
    const FocalAudit* den;
    const RatioAudit* ratio;
  };
  std::vector<Entry> entries;
  for (const auto& audit : audits) {
    Entry e{&audit, nullptr, nullptr, nullptr};
    for (const auto& fa : audit.focals) {
      if (fa.name == numerator) e.num = &fa;
      if (fa.name == denominator) e.den = &fa;
    }
    for (const auto& ra : audit.ratios) {
      if (ra.numerator == numerator && ra.denominator == denominator) e.ratio = &ra;
    }
    if (!e.num || !e.den)
      throw ValidationError("meta: audit '" + audit.name + "' does not expose both focals");
    entries.push_back(e);
  }

  ordered_json out;
  out["schema"] = "ordrobust.meta.v1";
  out["numerator"] = numerator;
  out["denominator"] = denominator;
  out["n_audits"] = static_cast<int>(entries.size());

  // Inverse-SE-weighted identity averages.
  auto weighted_identity = [&](bool use_num) {
    double wsum = 0.0;
    double acc = 0.0;
    for (const auto& e : entries) {
      const FocalAudit* fa = use_num ? e.num : e.den;
      const double w = 1.0 / fa->se_identity;
      wsum += w;
      acc += w * fa->beta_identity;
    }
    return acc / wsum;
  };
  out["identity_mean"] = ordered_json{{numerator, weighted_identity(true)},
                                      {denominator, weighted_identity(false)}};

  // Weighted coefficient-range curves over the shared budget grid.
  const std::vector<double>& grid = entries.front().num->budget_grid;
  for (const auto& e : entries) {
    if (e.num->budget_grid != grid || e.den->budget_grid != grid)
      throw ValidationError("meta: audits use different budget grids");
  }
  auto weighted_range = [&](bool use_num) {
    ordered_json lo = ordered_json::array();
    ordered_json hi = ordered_json::array();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double wsum = 0.0;
      double acc_lo = 0.0;
      double acc_hi = 0.0;
      for (const auto& e : entries) {
        const FocalAudit* fa = use_num ? e.num : e.den;
        const double w = 1.0 / fa->se_identity;
        wsum += w;
        acc_lo += w * fa->beta_lo[g];
        acc_hi += w * fa->beta_hi[g];
      }
      lo.push_back(acc_lo / wsum);
      hi.push_back(acc_hi / wsum);
    }
    ordered_json range;
    range["lo"] = lo;
    range["hi"] = hi;
    return range;
  };
  out["budget_grid"] = grid;
  out["range"] = ordered_json{{numerator, weighted_range(true)},
                              {denominator, weighted_range(false)}};

  // MRS ranges: denominator-reversible audits are excluded (the ratio is
  // unbounded there), with counts reported.
  int excluded = 0;
  std::vector<const Entry*> usable;
  for (const auto& e : entries) {
    if (e.den->reversible || !e.ratio || !e.ratio->bounded) {
      ++excluded;
    } else {
      usable.push_back(&e);
    }
  }
  out["mrs_excluded_reversible"] = excluded;
  if (usable.empty()) {
    out["mrs_available"] = false;
    return out;
  }
  out["mrs_available"] = true;
  ordered_json per_audit = ordered_json::array();
  ordered_json mean_lo = ordered_json::array();
  ordered_json mean_hi = ordered_json::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double acc_lo = 0.0;
    double acc_hi = 0.0;
    for (const Entry* e : usable) {
      acc_lo += e->ratio->ratio_lo[g];
      acc_hi += e->ratio->ratio_hi[g];
    }
    mean_lo.push_back(acc_lo / usable.size());
    mean_hi.push_back(acc_hi / usable.size());
  }
  for (const Entry* e : usable) {
    ordered_json a;
    a["name"] = e->audit->name;
    a["identity_ratio"] = e->ratio->identity_ratio;
    a["lo"] = e->ratio->ratio_lo;
    a["hi"] = e->ratio->ratio_hi;
    per_audit.push_back(a);
  }
  out["mrs"] = ordered_json{{"mean_lo", mean_lo}, {"mean_hi", mean_hi}, {"per_audit", per_audit}};
  return out;
}

ordered_json run_oracle_comparison(const Dataset& data, const AnalysisConfig& config,
                                   int resolution) {
  const DichotomizedBattery battery = fit_battery(data);
  const int k = battery.k_categories;
  if (k > 6) throw ValidationError("oracle: K > 6 exceeds the combinatorial guard");
  const double range = battery.range();
  const double alpha = alpha_for(k, config.alpha_policy);
  const double mv = max_var(k, range);
  const Mat p_cost = cost_matrix(k);

  ReversalOptions opts;
  opts.alpha = alpha;
  opts.bands = config.bands;

  ordered_json out;
  out["schema"] = "ordrobust.oracle.v1";
  out["resolution"] = resolution;
  out["grid_points"] = simplex_grid_size(k, resolution);
  ordered_json focals = ordered_json::array();

  for (const std::string& focal : config.focal) {
    ordered_json f;
    f["name"] = focal;
    const CoefficientKernel kernel = build_kernel(battery, focal, config.se_type);
    const Vec b = kernel.b;

    auto cost_of = [&](const Vec& w) {
      return std::pow(std::clamp(w.dot(p_cost * w) / mv, 0.0, 1.0), 1.0 / alpha);
    };

    // Sign reversal.
    const ReversalReport rev = min_cost_sign_reversal(battery, focal, opts);
    const GapVector identity = battery.identity_gaps();
    const double identity_sign = b.dot(identity.w) >= 0 ? 1.0 : -1.0;
    double grid_best = 2.0;
    enumerate_simplex_grid(k, range, resolution, [&](const Vec& w) {
      if (identity_sign * b.dot(w) <= 0.0) grid_best = std::min(grid_best, cost_of(w));
    });
    f["reversible"] = rev.reversible;
    f["grid_found_reversal"] = grid_best <= 1.0;
    if (rev.reversible && rev.min_cost && grid_best <= 1.0) {
      f["reversal_cost"] = rev.min_cost->c;
      f["reversal_cost_grid"] = grid_best;
      f["reversal_cost_gap"] = std::fabs(rev.min_cost->c - grid_best);
    }

    // p bounds.
    const PBounds pb = p_bounds(kernel, opts);
    double grid_t2_max = 0.0;
    double grid_t2_min = std::numeric_limits<double>::infinity();
    enumerate_simplex_grid(k, range, resolution, [&](const Vec& w) {
      const double den = w.dot(kernel.v * w);
      if (den <= 0.0) return;
      const double num = b.dot(w);
      const double t2 = num * num / den;
      grid_t2_max = std::max(grid_t2_max, t2);
      grid_t2_min = std::min(grid_t2_min, t2);
    });
    const double grid_p_min = student_t_two_sided_p(std::sqrt(grid_t2_max), kernel.dof_t);
    const double grid_p_max = student_t_two_sided_p(std::sqrt(grid_t2_min), kernel.dof_t);
    f["p_min"] = pb.p_min;
    f["p_min_grid"] = grid_p_min;
    f["p_min_gap"] = std::fabs(pb.p_min - grid_p_min);
    f["p_max"] = pb.p_max;
    f["p_max_grid"] = grid_p_max;
    f["p_max_gap"] = std::fabs(pb.p_max - grid_p_max);

    // Coefficient ranges at a few budgets.
    ordered_json ranges = ordered_json::array();
    for (const double budget : {0.25, 0.5, 1.0}) {
      const RangeAtBudget rb = beta_range_at_budget(battery, focal, budget, opts);
      double glo = std::numeric_limits<double>::infinity();
      double ghi = -std::numeric_limits<double>::infinity();
      enumerate_simplex_grid(k, range, resolution, [&](const Vec& w) {
        if (cost_of(w) > budget + 1e-12) return;
        const double val = b.dot(w);
        glo = std::min(glo, val);
        ghi = std::max(ghi, val);
      });
      ordered_json r;
      r["budget"] = budget;
      r["lo"] = rb.lo;
      r["hi"] = rb.hi;
      r["lo_grid"] = glo;
      r["hi_grid"] = ghi;
      r["gap"] = std::max(std::fabs(rb.lo - glo), std::fabs(rb.hi - ghi));
      ranges.push_back(r);
    }
    f["beta_ranges"] = ranges;
    focals.push_back(f);
  }
  out["focals"] = focals;
  return out;
}

ordered_json run_scale_use(const std::vector<ElicitationRecord>& records,
                           const ElicitationConfig& config, std::uint64_t seed) {
  const Vec& labels = config.labels;
  const int k = static_cast<int>(labels.size());
  const double alpha = alpha_for(k, config.alpha_policy);

  std::vector<std::string> methods = config.methods;
  if (methods.empty()) methods = {"linear_prompting", "objective_subjective", "sliders"};

  auto estimate_json = [](const ScaleUseEstimate& est) {
    ordered_json e;
    e["method"] = est.method;
    e["c"] = est.c.c;
    e["band"] = band_name(est.c.band);
    e["ci_lo"] = est.ci_lo;
    e["ci_hi"] = est.ci_hi;
    e["n_boot"] = est.n_boot;
    e["n_used"] = est.n_used;
    e["implied_labels"] = vec_to_json(est.implied_labels);
    e["monotonicity_repaired"] = est.monotonicity_repaired;
    e["interpolated_category"] = est.interpolated_category;
    e["excluded"] = est.excluded;
    return e;
  };

  ordered_json out;
  out["schema"] = "ordrobust.scaleuse.v1";
  out["alpha"] = alpha;
  out["estimates"] = ordered_json::array();

  for (const std::string& method : methods) {
    if (method == "linear_prompting") {
      IVec codes;
      std::vector<double> continuous;
      for (const auto& rec : records) {
        if (rec.arm == ElicitationArm::unprompted && rec.discrete_response)
          codes.push_back(*rec.discrete_response + 1);
        if (rec.arm == ElicitationArm::linear_prompted && rec.continuous_response)
          continuous.push_back(*rec.continuous_response);
      }
      out["estimates"].push_back(
          estimate_json(quantile_match(codes, continuous, labels, alpha, config.n_boot, seed)));
    } else if (method == "objective_subjective") {
      IVec codes;
      std::vector<double> objective;
      for (const auto& rec : records) {
        if (rec.discrete_response && rec.objective_value) {
          codes.push_back(*rec.discrete_response + 1);
          objective.push_back(*rec.objective_value);
        }
      }
      out["estimates"].push_back(estimate_json(
          objective_subjective(codes, objective, labels, alpha, config.n_boot, seed)));
    } else if (method == "sliders") {
      std::vector<Vec> sliders;
      for (const auto& rec : records) {
        if (rec.slider_positions) sliders.push_back(*rec.slider_positions);
      }
      const SliderCostResult res = slider_cost(sliders, labels, alpha, config.n_boot, seed);
      out["estimates"].push_back(estimate_json(res.estimate));
    } else {
      throw ValidationError("unknown scale-use method '" + method + "'");
    }
  }
  return out;
}

}  // namespace ordrobust
