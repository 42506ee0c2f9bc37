#include "ordrobust/synth.hpp"

#include <algorithm>
#include <cmath>

namespace ordrobust {

using nlohmann::json;

GeneratorSpec parse_generator_spec(const json& j) {
  GeneratorSpec spec;
  spec.n = j.value("n", 500);
  spec.k_categories = j.value("k", 11);
  spec.l1 = j.value("l1", 0.0);
  spec.range = j.value("range", 10.0);
  spec.intercept = j.value("intercept", spec.l1 + 0.5 * spec.range);
  spec.noise_sd = j.value("noise_sd", 1.0);
  spec.noise_sd_slope = j.value("noise_sd_slope", 0.0);
  spec.seed = j.value("seed", 1ull);
  if (j.contains("beta")) {
    const auto& arr = j.at("beta");
    spec.beta.resize(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i) spec.beta(i) = arr[i].get<double>();
  }
  if (j.contains("covariates")) {
    for (const auto& c : j.at("covariates")) {
      GeneratorSpec::Covariate cov;
      cov.name = c.at("name").get<std::string>();
      const std::string kind = c.value("kind", "normal");
      if (kind == "normal") {
        cov.kind = GeneratorSpec::Covariate::Kind::normal;
        cov.param = c.value("sd", 1.0);
      } else if (kind == "bernoulli") {
        cov.kind = GeneratorSpec::Covariate::Kind::bernoulli;
        cov.param = c.value("p", 0.5);
      } else {
        throw ValidationError("generator: covariate kind must be normal|bernoulli");
      }
      spec.covariates.push_back(cov);
    }
  }
  if (j.contains("reporting_labels")) {
    const auto& arr = j.at("reporting_labels");
    spec.reporting_labels.resize(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
      spec.reporting_labels(i) = arr[i].get<double>();
  } else if (j.contains("reporting_preset")) {
    spec.reporting_labels = preset_reporting_labels(j.at("reporting_preset").get<std::string>(),
                                                    spec.k_categories, spec.l1, spec.range);
  }
  return spec;
}

namespace {

Vec resolve_labels(const GeneratorSpec& spec) {
  if (spec.reporting_labels.size() == 0)
    return Vec::LinSpaced(spec.k_categories, spec.l1, spec.l1 + spec.range);
  if (spec.reporting_labels.size() != spec.k_categories)
    throw ValidationError("generator: reporting labels must have K entries");
  for (int i = 1; i < spec.reporting_labels.size(); ++i) {
    if (!(spec.reporting_labels(i) > spec.reporting_labels(i - 1)))
      throw ValidationError("generator: reporting labels must be strictly increasing");
  }
  return spec.reporting_labels;
}

Mat draw_covariates(const GeneratorSpec& spec, int n, Rng& rng) {
  const int m = static_cast<int>(spec.covariates.size());
  Mat x(n, m);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < m; ++c) {
      const auto& cov = spec.covariates[c];
      x(i, c) = cov.kind == GeneratorSpec::Covariate::Kind::normal
                    ? rng.normal() * cov.param
                    : (rng.bernoulli(cov.param) ? 1.0 : 0.0);
    }
  }
  return x;
}

// Piecewise-linear reporting transform mapping the equidistant original grid
// onto the planted labels.
double report_through(const Vec& labels, double l1, double range, double s) {
  const int k = static_cast<int>(labels.size());
  const double step = range / (k - 1);
  const double clamped = std::clamp(s, l1, l1 + range);
  const double pos = (clamped - l1) / step;
  const int j = std::min(static_cast<int>(std::floor(pos)), k - 2);
  const double frac = pos - j;
  return labels(j) + frac * (labels(j + 1) - labels(j));
}

}  // namespace

Vec preset_reporting_labels(const std::string& name, int k_categories, double l1,
                            double range) {
  Vec grid = Vec::LinSpaced(k_categories, 0.0, 1.0);
  Vec shape(k_categories);
  if (name == "linear") {
    shape = grid;
  } else if (name == "concave") {
    for (int i = 0; i < k_categories; ++i) shape(i) = std::sqrt(grid(i));
  } else if (name == "convex") {
    for (int i = 0; i < k_categories; ++i) shape(i) = grid(i) * grid(i);
  } else if (name == "logistic") {
    for (int i = 0; i < k_categories; ++i)
      shape(i) = 1.0 / (1.0 + std::exp(-6.0 * (grid(i) - 0.5)));
  } else if (name == "inverse_logistic") {
    // inverse function of the logistic preset, sampled over its range
    const double g0 = 1.0 / (1.0 + std::exp(3.0));
    const double g1 = 1.0 / (1.0 + std::exp(-3.0));
    for (int i = 0; i < k_categories; ++i) {
      const double y = g0 + grid(i) * (g1 - g0);
      shape(i) = 0.5 + std::log(y / (1.0 - y)) / 6.0;
    }
  } else {
    throw ValidationError("unknown reporting preset '" + name + "'");
  }
  // normalize endpoints exactly
  const double lo = shape(0);
  const double hi = shape(k_categories - 1);
  return ((shape.array() - lo) / (hi - lo) * range + l1).matrix();
}

GeneratedRegression generate_regression_data(const GeneratorSpec& spec) {
  if (static_cast<int>(spec.covariates.size()) != spec.beta.size())
    throw ValidationError("generator: beta length must match the covariate list");
  Rng rng(spec.seed);
  const Vec labels = resolve_labels(spec);
  const int k = spec.k_categories;
  const int n = spec.n;

  const Mat x = draw_covariates(spec, n, rng);
  Vec s(n);
  for (int i = 0; i < n; ++i) {
    double sd = spec.noise_sd;
    if (spec.noise_sd_slope != 0.0 && x.cols() > 0)
      sd *= std::max(0.05, 1.0 + spec.noise_sd_slope * x(i, 0));
    s(i) = spec.intercept + x.row(i).dot(spec.beta) + sd * rng.normal();
  }

  // Midpoint thresholds between the reporting labels; ties go up.
  Vec thresholds(k - 1);
  for (int c = 0; c < k - 1; ++c) thresholds(c) = 0.5 * (labels(c) + labels(c + 1));

  GeneratedRegression out;
  out.data.outcome.labels = Vec::LinSpaced(k, spec.l1, spec.l1 + spec.range);
  out.data.outcome.codes.resize(n);
  for (int i = 0; i < n; ++i) {
    int code = 1;
    for (int c = 0; c < k - 1; ++c)
      if (s(i) >= thresholds(c)) code = c + 2;
    out.data.outcome.codes[i] = code;
  }
  {
    const auto counts = out.data.outcome.category_counts();
    int nonzero = 0;
    for (const int c : counts) nonzero += c > 0 ? 1 : 0;
    if (nonzero < 2) throw ValidationError("generator: degenerate spec, all mass in one category");
  }

  DesignSpec& design = out.data.design;
  design.intercept = true;
  design.names.push_back("(Intercept)");
  for (const auto& cov : spec.covariates) design.names.push_back(cov.name);
  design.x.resize(n, x.cols() + 1);
  design.x.col(0) = Vec::Ones(n);
  design.x.rightCols(x.cols()) = x;
  if (!spec.covariates.empty()) design.focal.push_back(spec.covariates[0].name);

  out.truth.beta = spec.beta;
  out.truth.intercept = spec.intercept;
  out.truth.reporting_labels = labels;
  out.truth.thresholds = thresholds;
  out.truth.true_cost_fixed2 = cost(gaps_from_labels(labels), 2.0).c;
  return out;
}

GeneratedElicitation generate_elicitation(const GeneratorSpec& spec, ElicitationMethod method,
                                          const ElicitationOptions& options) {
  Rng rng(spec.seed);
  const Vec labels = resolve_labels(spec);
  const int k = spec.k_categories;
  const double l1 = spec.l1;
  const double range = spec.range;

  // A linear scale-user splits the latent range into K equal bins; a
  // non-linear one reports through the transform, so the bin edges move to
  // f(edge). Quantile matching then recovers exactly these edges.
  Vec edges(k - 1);
  for (int c = 0; c < k - 1; ++c) {
    const double original_edge = l1 + (c + 1) * range / k;
    edges(c) = report_through(labels, l1, range, original_edge);
  }

  // Latent state shared by both arms (iid draws).
  Vec tooth_mass(k - 1);
  for (int c = 0; c < k - 1; ++c) {
    const double p = static_cast<double>(c + 1) / k;
    tooth_mass(c) = std::sqrt(p * (1.0 - p));
  }
  const double tooth_total = tooth_mass.sum();
  const double tooth_width = range / k;
  auto draw_latent = [&] {
    if (options.latent == ElicitationOptions::Latent::uniform)
      return l1 + range * rng.uniform();
    const double u = rng.uniform();
    if (u < options.comb_floor_mass) return l1 + range * rng.uniform();
    double pick = (u - options.comb_floor_mass) / (1.0 - options.comb_floor_mass) * tooth_total;
    int c = 0;
    while (c < k - 2 && pick > tooth_mass(c)) pick -= tooth_mass(c++);
    const double s = edges(c) + 0.5 * tooth_width * (rng.uniform() + rng.uniform() - 1.0);
    return std::clamp(s, l1, l1 + range);
  };
  auto discrete_report = [&](double s) {
    int point = 0;  // scale points 0..K-1
    for (int c = 0; c < k - 1; ++c)
      if (s >= edges(c)) point = c + 1;
    return point;
  };

  GeneratedElicitation out;
  out.truth.reporting_labels = labels;
  {
    // The estimators target the boundary vector (edges..., l_K) rescaled to
    // the full range; record its cost as the planted truth.
    Vec boundary_labels(k);
    boundary_labels.head(k - 1) = edges;
    boundary_labels(k - 1) = l1 + range;
    const double first = boundary_labels(0);
    const double last = boundary_labels(k - 1);
    Vec rescaled = ((boundary_labels.array() - first) / (last - first) * range + l1).matrix();
    out.truth.true_cost_fixed2 = cost(gaps_from_labels(rescaled), 2.0).c;
  }

  switch (method) {
    case ElicitationMethod::linear_prompting: {
      for (int i = 0; i < options.n_per_arm; ++i) {
        ElicitationRecord rec;
        rec.arm = ElicitationArm::unprompted;
        rec.discrete_response = discrete_report(draw_latent());
        out.records.push_back(rec);
      }
      for (int i = 0; i < options.n_per_arm; ++i) {
        ElicitationRecord rec;
        rec.arm = ElicitationArm::linear_prompted;
        rec.continuous_response = draw_latent();  // prompted arm reports linearly
        out.records.push_back(rec);
      }
      break;
    }
    case ElicitationMethod::objective_subjective: {
      for (int i = 0; i < options.n_per_arm; ++i) {
        const double s = draw_latent();
        ElicitationRecord rec;
        rec.arm = ElicitationArm::unprompted;
        rec.discrete_response = discrete_report(s);
        rec.objective_value = options.objective_offset + options.objective_scale * (s - l1);
        out.records.push_back(rec);
      }
      break;
    }
    case ElicitationMethod::sliders: {
      for (int i = 0; i < options.n_per_arm; ++i) {
        ElicitationRecord rec;
        rec.arm = ElicitationArm::unprompted;
        Vec pos(k);
        for (int c = 0; c < k; ++c) {
          pos(c) = std::clamp(labels(c) + options.slider_noise_sd * rng.normal(), l1,
                              l1 + range);
        }
        rec.slider_positions = pos;
        out.records.push_back(rec);
      }
      out.truth.true_cost_fixed2 = cost(gaps_from_labels(labels), 2.0).c;
      break;
    }
  }
  return out;
}

}  // namespace ordrobust
