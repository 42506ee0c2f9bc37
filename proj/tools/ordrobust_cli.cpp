#include "ordrobust/report.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

namespace {

using namespace ordrobust;
using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;

void emit(const ordered_json& j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty() || out_path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ValidationError("cannot write output file '" + out_path + "'");
  out << text;
}

ordered_json error_json(const std::string& kind, const std::string& message) {
  ordered_json j;
  j["error"] = ordered_json{{"kind", kind}, {"message", message}};
  return j;
}

struct CommonArgs {
  std::string config_path;
  std::string data_path;
  std::string out_path;
  std::uint64_t seed = 1;
  double grid_step = 0.05;
  std::string alpha_policy;
  std::string se_type;
  int resolution = 60;
};

AnalysisConfig load_config_with_overrides(const CommonArgs& args) {
  AnalysisConfig config = load_analysis_config(args.config_path);
  if (!args.alpha_policy.empty()) config.alpha_policy = alpha_policy_from_string(args.alpha_policy);
  if (!args.se_type.empty()) config.se_type = se_type_from_string(args.se_type);
  return config;
}

int cmd_analyze(const CommonArgs& args) {
  const AnalysisConfig config = load_config_with_overrides(args);
  const Dataset data = load_dataset(args.data_path, config);
  AuditOptions options;
  options.grid_step = args.grid_step;
  options.seed = args.seed;
  AuditReport report = run_audit(data, config, options);
  report.name = args.data_path;
  emit(audit_to_json(report), args.out_path);
  return kExitOk;
}

int cmd_batch(const std::string& manifest_path, const CommonArgs& args) {
  BatchManifest manifest = load_batch_manifest(manifest_path);
  if (args.grid_step > 0.0 && args.grid_step != 0.05) manifest.grid_step = args.grid_step;
  AuditOptions options;
  options.grid_step = 0.05;
  options.seed = args.seed;
  const BatchResult result = run_batch(manifest, options);

  const std::string base = args.out_path.empty() ? "batch" : args.out_path;
  write_csv(base + "_curves.csv", curves_to_csv(result));
  {
    std::ofstream out(base + "_summary.json", std::ios::binary);
    if (!out) throw ValidationError("cannot write '" + base + "_summary.json'");
    out << result.summary.dump(2) << "\n";
  }
  for (const auto& audit : result.audits) {
    std::ofstream out(base + "_audit_" + audit.name + ".json", std::ios::binary);
    if (!out) throw ValidationError("cannot write audit JSON for '" + audit.name + "'");
    out << audit_to_json(audit).dump(2) << "\n";
  }
  std::cout << result.summary.dump(2) << "\n";
  return result.failures > 0 ? kExitNumeric : kExitOk;
}

int cmd_meta(const std::vector<std::string>& audit_paths, const std::string& numerator,
             const std::string& denominator, const CommonArgs& args) {
  std::vector<AuditReport> audits;
  for (const auto& path : audit_paths) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open audit '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ValidationError(std::string("audit JSON parse error: ") + e.what());
    }
    audits.push_back(audit_from_json(j));
  }
  emit(run_meta(audits, numerator, denominator), args.out_path);
  return kExitOk;
}

int cmd_oracle(const CommonArgs& args) {
  const AnalysisConfig config = load_config_with_overrides(args);
  const Dataset data = load_dataset(args.data_path, config);
  emit(run_oracle_comparison(data, config, args.resolution), args.out_path);
  return kExitOk;
}

int cmd_scale_use(const CommonArgs& args) {
  ElicitationConfig config = load_elicitation_config(args.config_path);
  if (!args.alpha_policy.empty()) config.alpha_policy = alpha_policy_from_string(args.alpha_policy);
  const std::vector<ElicitationRecord> records = load_elicitation(args.data_path, config);
  emit(run_scale_use(records, config, args.seed), args.out_path);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robustness audits for regressions on bounded ordered response scales"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string manifest_path;
  std::vector<std::string> audit_paths;
  std::string pair_numerator;
  std::string pair_denominator;

  auto add_common = [&](CLI::App* cmd, bool needs_config, bool needs_data) {
    auto* config_opt = cmd->add_option("--config", args.config_path, "analysis config JSON");
    auto* data_opt = cmd->add_option("--data", args.data_path, "input CSV");
    if (needs_config) config_opt->required();
    if (needs_data) data_opt->required();
    cmd->add_option("--out", args.out_path, "output path (default stdout)");
    cmd->add_option("--seed", args.seed, "RNG seed");
    cmd->add_option("--grid-step", args.grid_step, "cost grid step");
    cmd->add_option("--alpha-policy", args.alpha_policy, "override: fixed2|log10");
    cmd->add_option("--se-type", args.se_type, "override: homoskedastic|robust|clustered");
    cmd->add_option("--resolution", args.resolution, "grid-oracle resolution");
  };

  auto* analyze = app.add_subcommand("analyze", "audit one regression dataset");
  add_common(analyze, true, true);

  auto* batch = app.add_subcommand("batch", "run a manifest of audits into curves");
  batch->add_option("--manifest", manifest_path, "batch manifest JSON")->required();
  add_common(batch, false, false);

  auto* meta = app.add_subcommand("meta", "inverse-SE-weighted synthesis of audits");
  meta->add_option("--audits", audit_paths, "audit JSON files")->required()->expected(-1);
  meta->add_option("--numerator", pair_numerator, "numerator focal name")->required();
  meta->add_option("--denominator", pair_denominator, "denominator focal name")->required();
  add_common(meta, false, false);

  auto* oracle = app.add_subcommand("oracle", "compare optimizer outputs to the grid oracle");
  add_common(oracle, true, true);

  auto* scale_use = app.add_subcommand("scale-use", "estimate scale-use non-linearity");
  add_common(scale_use, true, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(analyze)) return cmd_analyze(args);
    if (app.got_subcommand(batch)) return cmd_batch(manifest_path, args);
    if (app.got_subcommand(meta)) return cmd_meta(audit_paths, pair_numerator, pair_denominator, args);
    if (app.got_subcommand(oracle)) return cmd_oracle(args);
    if (app.got_subcommand(scale_use)) return cmd_scale_use(args);
  } catch (const ordrobust::ValidationError& e) {
    std::cout << error_json("validation", e.what()).dump(2) << "\n";
    return kExitValidation;
  } catch (const ordrobust::NumericError& e) {
    std::cout << error_json("numeric", e.what()).dump(2) << "\n";
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cout << error_json("internal", e.what()).dump(2) << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
