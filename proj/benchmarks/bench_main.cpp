// Micro-benchmarks for the solver stack. Uses google-benchmark when the
// package is installed; otherwise falls back to a plain chrono harness with
// the same benchmark bodies.
#include "ordrobust/battery.hpp"
#include "ordrobust/fractional.hpp"
#include "ordrobust/inference.hpp"
#include "ordrobust/reversal.hpp"
#include "ordrobust/synth.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace ordrobust;

namespace {

Dataset make_data(int n, int k) {
  GeneratorSpec spec;
  spec.n = n;
  spec.k_categories = k;
  spec.noise_sd = 1.0;
  spec.noise_sd_slope = 0.4;
  spec.beta = (Vec(2) << 0.4, -0.2).finished();
  spec.covariates.push_back({"x1", GeneratorSpec::Covariate::Kind::normal, 1.0});
  spec.covariates.push_back({"x2", GeneratorSpec::Covariate::Kind::bernoulli, 0.5});
  spec.seed = 99;
  return generate_regression_data(spec).data;
}

struct Case {
  std::string name;
  std::function<void()> body;
};

std::vector<Case> make_cases() {
  static Dataset data_small = make_data(1000, 11);
  static Dataset data_large = make_data(20000, 11);
  static DichotomizedBattery battery = fit_battery(data_small);
  static CoefficientKernel kernel = build_kernel(battery, "x1", SeType::robust);

  std::vector<Case> cases;
  cases.push_back({"fit_battery_n1000_k11", [] { fit_battery(data_small); }});
  cases.push_back({"fit_battery_n20000_k11", [] { fit_battery(data_large); }});
  cases.push_back({"min_cost_sign_reversal_k11", [] {
                     min_cost_sign_reversal(battery, "x1");
                   }});
  cases.push_back({"p_bounds_k11", [] { p_bounds(kernel); }});
  cases.push_back({"beta_range_budget_k11", [] {
                     beta_range_at_budget(battery, "x1", 0.15);
                   }});
  cases.push_back({"significance_reversal_k11", [] {
                     min_cost_significance_reversal(kernel, 0.05,
                                                    p_value(kernel, kernel.identity_gaps()) <= 0.05
                                                        ? CrossDirection::lose
                                                        : CrossDirection::gain);
                   }});
  return cases;
}

}  // namespace

#if defined(ORDROBUST_HAVE_GBENCH)

#include <benchmark/benchmark.h>

int main(int argc, char** argv) {
  for (auto& c : make_cases()) {
    benchmark::RegisterBenchmark(c.name.c_str(), [body = c.body](benchmark::State& state) {
      for (auto _ : state) body();
    });
  }
  benchmark::Initialize(&argc, argv);
  benchmark::RunSpecifiedBenchmarks();
  return 0;
}

#else

int main() {
  using clock = std::chrono::steady_clock;
  std::printf("%-36s %12s %10s\n", "benchmark", "mean_us", "runs");
  for (auto& c : make_cases()) {
    // warm-up
    c.body();
    int runs = 0;
    const auto start = clock::now();
    std::chrono::duration<double> elapsed{0};
    do {
      c.body();
      ++runs;
      elapsed = clock::now() - start;
    } while (elapsed.count() < 0.5 && runs < 1000);
    std::printf("%-36s %12.1f %10d\n", c.name.c_str(), 1e6 * elapsed.count() / runs, runs);
  }
  return 0;
}

#endif
