#include "ordrobust/synth.hpp"

#include "ordrobust/battery.hpp"
#include "ordrobust/reversal.hpp"

#include <doctest.h>

#include <cmath>

using namespace ordrobust;

TEST_CASE("noiseless monotone effect yields uniform cut signs") {
  GeneratorSpec spec;
  spec.n = 400;
  spec.k_categories = 5;
  spec.l1 = 1.0;
  spec.range = 4.0;
  spec.intercept = 3.0;
  spec.noise_sd = 0.0;
  spec.beta = (Vec(1) << 2.0).finished();
  spec.covariates.push_back({"x", GeneratorSpec::Covariate::Kind::normal, 1.0});
  spec.seed = 9;

  const GeneratedRegression gen = generate_regression_data(spec);
  const DichotomizedBattery battery = fit_battery(gen.data);
  CHECK(!check_reversibility(battery, "x"));
}

TEST_CASE("noiseless data on label points recovers the planted slope exactly") {
  GeneratorSpec spec;
  spec.n = 300;
  spec.k_categories = 11;
  spec.l1 = 0.0;
  spec.range = 10.0;
  spec.intercept = 4.0;
  spec.noise_sd = 0.0;
  spec.beta = (Vec(1) << 2.0).finished();
  spec.covariates.push_back({"d", GeneratorSpec::Covariate::Kind::bernoulli, 0.5});
  spec.seed = 40;

  const GeneratedRegression gen = generate_regression_data(spec);
  // latent s in {4, 6}: exactly on label points, so the identity regression
  // reproduces the planted slope
  const DichotomizedBattery battery = fit_battery(gen.data);
  const double beta = recompose_beta(battery, battery.identity_gaps(), "d");
  CHECK(beta == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(gen.truth.true_cost_fixed2 == 0.0);
}

TEST_CASE("heteroskedastic twist plants a reversible focal") {
  GeneratorSpec spec;
  spec.n = 4000;
  spec.k_categories = 7;
  spec.l1 = 1.0;
  spec.range = 6.0;
  spec.intercept = 4.0;
  spec.noise_sd = 1.2;
  spec.noise_sd_slope = 0.8;  // x widens the response distribution in both tails
  spec.beta = (Vec(1) << 0.0).finished();
  spec.covariates.push_back({"x", GeneratorSpec::Covariate::Kind::normal, 1.0});
  spec.seed = 3;

  const GeneratedRegression gen = generate_regression_data(spec);
  const DichotomizedBattery battery = fit_battery(gen.data);
  CHECK(check_reversibility(battery, "x"));
}

TEST_CASE("generation is byte-stable under a fixed seed") {
  GeneratorSpec spec;
  spec.n = 120;
  spec.k_categories = 5;
  spec.beta = (Vec(1) << 1.0).finished();
  spec.covariates.push_back({"x", GeneratorSpec::Covariate::Kind::normal, 1.0});
  spec.seed = 123;

  const GeneratedRegression a = generate_regression_data(spec);
  const GeneratedRegression b = generate_regression_data(spec);
  CHECK(a.data.outcome.codes == b.data.outcome.codes);
  CHECK((a.data.design.x - b.data.design.x).cwiseAbs().maxCoeff() == 0.0);

  const GeneratedElicitation e1 = generate_elicitation(spec, ElicitationMethod::sliders);
  const GeneratedElicitation e2 = generate_elicitation(spec, ElicitationMethod::sliders);
  REQUIRE(e1.records.size() == e2.records.size());
  for (std::size_t i = 0; i < e1.records.size(); ++i) {
    CHECK((*e1.records[i].slider_positions - *e2.records[i].slider_positions)
              .cwiseAbs()
              .maxCoeff() == 0.0);
  }
}

TEST_CASE("degenerate generator spec is rejected") {
  GeneratorSpec spec;
  spec.n = 100;
  spec.k_categories = 5;
  spec.intercept = 100.0;  // all mass lands in the top category
  spec.noise_sd = 0.0;
  spec.beta = (Vec(1) << 0.0).finished();
  spec.covariates.push_back({"x", GeneratorSpec::Covariate::Kind::normal, 1.0});
  CHECK_THROWS_AS(generate_regression_data(spec), ValidationError);
}

TEST_CASE("presets are monotone with pinned endpoints") {
  for (const std::string name : {"linear", "concave", "convex", "logistic", "inverse_logistic"}) {
    const Vec labels = preset_reporting_labels(name, 11, 0.0, 10.0);
    CHECK(labels(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(labels(10) == doctest::Approx(10.0).epsilon(1e-12));
    for (int i = 1; i < 11; ++i) CHECK(labels(i) > labels(i - 1));
  }
  // logistic and its inverse are genuinely non-linear
  CHECK(cost(gaps_from_labels(preset_reporting_labels("logistic", 11, 0.0, 10.0)), 2.0).c > 0.1);
}

TEST_CASE("elicitation truth matches the generator's boundary construction") {
  GeneratorSpec spec;
  spec.k_categories = 11;
  const GeneratedElicitation gen =
      generate_elicitation(spec, ElicitationMethod::linear_prompting, {});
  // linear reporting: boundaries at equal-width bin edges, planted cost zero
  CHECK(gen.truth.true_cost_fixed2 == doctest::Approx(0.0).epsilon(1e-12));
}
