#include "ordrobust/inference.hpp"

#include "ordrobust/fractional.hpp"
#include "ordrobust/grid.hpp"
#include "ordrobust/mathutil.hpp"
#include "fixtures.hpp"
#include "grid_refine.hpp"
#include "oracle_regression.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace ordrobust;

namespace {

struct GridT2 {
  double t2_min = 1e300;
  double t2_max = 0.0;
};

GridT2 grid_t2(const Vec& b, const Mat& v, double range, int resolution) {
  GridT2 out;
  const int k = static_cast<int>(b.size()) + 1;
  enumerate_simplex_grid(k, range, resolution, [&](const Vec& w) {
    const double den = w.dot(v * w);
    if (den <= 0.0) return;
    const double num = b.dot(w);
    const double t2 = num * num / den;
    out.t2_min = std::min(out.t2_min, t2);
    out.t2_max = std::max(out.t2_max, t2);
  });
  return out;
}

}  // namespace

TEST_CASE("p_value at identity matches the direct regression") {
  Rng rng(21);
  fixtures::RandomDatasetOptions opt;
  opt.n = 140;
  opt.k = 5;
  Dataset data = fixtures::random_dataset(rng, opt);
  const DichotomizedBattery battery = fit_battery(data);
  const CoefficientKernel kernel = build_kernel(battery, "x1", SeType::robust);

  const auto direct = oracle::direct_fit(data.design.x, data.outcome.values(), SeType::robust);
  const int col = data.design.column("x1");
  CHECK(p_value(kernel, kernel.identity_gaps()) ==
        doctest::Approx(direct.p(col)).epsilon(1e-10));
}

TEST_CASE("p_value is invariant to rescaling the gaps") {
  Rng rng(4);
  const Vec b = (Vec(3) << 0.7, -0.2, 0.4).finished();
  const Mat v = fixtures::random_psd(rng, 3);
  const auto kernel = fixtures::synthetic_kernel(b, v, 50.0);
  GapVector gaps;
  gaps.w = (Vec(3) << 0.5, 1.2, 1.3).finished();
  gaps.range = 3.0;
  const double p1 = p_value(kernel, gaps);
  GapVector scaled;
  scaled.w = 3.7 * gaps.w;
  scaled.range = 3.7 * gaps.range;
  CHECK(p_value(kernel, scaled) == doctest::Approx(p1).epsilon(1e-12));
}

TEST_CASE("reversible focal attains p_max = 1") {
  Rng rng(8);
  const Vec b = (Vec(3) << 0.8, -0.5, 0.3).finished();
  const auto kernel = fixtures::synthetic_kernel(b, fixtures::random_psd(rng, 3), 80.0);
  const PBounds pb = p_bounds(kernel);
  CHECK(pb.p_max > 1.0 - 1e-6);
  CHECK(pb.p_min <= p_value(kernel, kernel.identity_gaps()) + 1e-12);
}

TEST_CASE("p bounds bracket the identity p-value") {
  Rng rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const int cuts = 2 + rng.uniform_int(3);
    Vec b(cuts);
    for (int i = 0; i < cuts; ++i) b(i) = rng.normal();
    const auto kernel = fixtures::synthetic_kernel(b, fixtures::random_psd(rng, cuts), 60.0);
    const PBounds pb = p_bounds(kernel);
    const double p_id = p_value(kernel, kernel.identity_gaps());
    CHECK(pb.p_min <= p_id + 1e-9);
    CHECK(pb.p_max >= p_id - 1e-9);
  }
}

TEST_CASE("p bounds agree with the refined grid oracle on K <= 5") {
  Rng rng(99);
  for (int trial = 0; trial < 25; ++trial) {
    const int cuts = 2 + rng.uniform_int(3);  // K in {3,4,5}
    Vec b(cuts);
    for (int i = 0; i < cuts; ++i) b(i) = rng.normal();
    const Mat v = fixtures::random_psd(rng, cuts);
    const auto kernel = fixtures::synthetic_kernel(b, v, 45.0);

    const PBounds pb = p_bounds(kernel);
    auto t2_of = [&](const Vec& w) {
      const double den = w.dot(v * w);
      if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
      const double num = b.dot(w);
      return num * num / den;
    };
    const auto hi = gridrefine::refined_oracle(cuts + 1, kernel.range_value, 60, t2_of, true);
    const auto lo = gridrefine::refined_oracle(cuts + 1, kernel.range_value, 60, t2_of, false);
    const double grid_p_min = student_t_two_sided_p(std::sqrt(hi.value), 45.0);
    const double grid_p_max = student_t_two_sided_p(std::sqrt(lo.value), 45.0);

    // the exact bound dominates any lattice up to solver tolerance
    CHECK(pb.p_min <= grid_p_min + 1e-6);
    CHECK(grid_p_min - pb.p_min <= 1e-3);
    CHECK(pb.p_max >= grid_p_max - 1e-6);
    CHECK(pb.p_max - grid_p_max <= 1e-3);
  }
}

TEST_CASE("t^2 extremes are invariant to the normalization constant") {
  Rng rng(31);
  const Vec b = (Vec(3) << 1.0, 0.4, 0.9).finished();
  const Mat v = fixtures::random_psd(rng, 3);

  TsqProblem pr;
  pr.b = b;
  pr.v = v;
  pr.polytope = gap_polytope(3, 3.0, default_epsilon_gap(4, 3.0));
  pr.p_cost = cost_matrix(4);
  const double t2_a = max_t2(pr).t2;

  TsqProblem pr2 = pr;
  pr2.polytope = gap_polytope(3, 6.0, default_epsilon_gap(4, 6.0));
  const double t2_b = max_t2(pr2).t2;
  CHECK(t2_a == doctest::Approx(t2_b).epsilon(1e-9));
}

TEST_CASE("dinkelbach: identity-direction b leaves the ratio constant") {
  // b in the span of the ones vector: t^2 constant on the slice when V = I
  // restricted appropriately; the iteration returns the center seed.
  const Vec b = Vec::Ones(3);
  Mat v = Mat::Identity(3, 3);
  TsqProblem pr;
  pr.b = b;
  pr.v = v;
  pr.polytope = gap_polytope(3, 3.0, 1e-6);
  pr.p_cost = cost_matrix(4);
  const DinkelbachResult res = dinkelbach_max_ratio(pr);
  // (b.w)^2 = L^2 fixed; w'w is minimized at the center, so the max is there.
  CHECK(res.ratio == doctest::Approx(9.0 / 3.0).epsilon(1e-6));
  CHECK(res.converged);
}

TEST_CASE("dinkelbach matches the grid oracle and is monotone") {
  Rng rng(55);
  for (int trial = 0; trial < 15; ++trial) {
    const int cuts = 3;
    Vec b(cuts);
    for (int i = 0; i < cuts; ++i) b(i) = rng.normal();
    const Mat v = fixtures::random_psd(rng, cuts);
    TsqProblem pr;
    pr.b = b;
    pr.v = v;
    pr.polytope = gap_polytope(cuts, 4.0, default_epsilon_gap(cuts + 1, 4.0));
    pr.p_cost = cost_matrix(cuts + 1);

    const DinkelbachResult res = dinkelbach_max_ratio(pr);
    const GridT2 g = grid_t2(b, v, 4.0, 150);
    CHECK(res.ratio >= g.t2_max - 1e-3 * (1.0 + g.t2_max));
  }
}

TEST_CASE("dinkelbach converges within 50 iterations on homoskedastic balanced designs") {
  Rng rng(41);
  for (int trial = 0; trial < 10; ++trial) {
    fixtures::RandomDatasetOptions opt;
    opt.n = 240;
    opt.k = 4 + trial % 2;
    opt.m_covariates = 2;
    Dataset data = fixtures::random_dataset(rng, opt);
    const DichotomizedBattery battery = fit_battery(data);
    const CoefficientKernel kernel = build_kernel(battery, "x1", SeType::homoskedastic);

    TsqProblem pr;
    pr.b = kernel.b_eff;
    pr.v = kernel.v_eff;
    pr.polytope = gap_polytope(kernel.range_value, kernel.effective.floor_for(
                                                       default_epsilon_gap(
                                                           kernel.k_categories,
                                                           kernel.range_value)));
    pr.p_cost = cost_matrix(kernel.k_categories);
    for (const bool maximize : {true, false}) {
      const DinkelbachResult res = dinkelbach_max_ratio(pr, std::nullopt, maximize);
      CHECK(res.converged);
      CHECK(res.iterations <= 50);
    }
  }
}

TEST_CASE("budgeted p bounds are monotone in the budget") {
  Rng rng(3);
  const Vec b = (Vec(3) << 0.9, -0.4, 0.2).finished();
  const auto kernel = fixtures::synthetic_kernel(b, fixtures::random_psd(rng, 3), 70.0);
  ReversalOptions opts;

  double prev_min = 2.0;
  double prev_max = -1.0;
  std::vector<Vec> warm;
  for (const double c : {0.0, 0.1, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    Vec arg;
    const BudgetedPBounds pb = p_bounds_at_budget(kernel, c, opts, warm, &arg);
    if (prev_max >= 0.0) {
      CHECK(pb.p_min <= prev_min + 1e-9);
      CHECK(pb.p_max >= prev_max - 1e-9);
    }
    prev_min = pb.p_min;
    prev_max = pb.p_max;
    warm.assign(1, arg);
  }
  // Unbudgeted bounds are the c = 1 limits.
  const PBounds pb = p_bounds(kernel, opts);
  CHECK(prev_min == doctest::Approx(pb.p_min).epsilon(1e-6));
  CHECK(prev_max == doctest::Approx(pb.p_max).epsilon(1e-6));
}

TEST_CASE("significance reversal: thresholds outside the attainable range") {
  Rng rng(10);
  const Vec b = (Vec(3) << 1.2, 0.8, 1.0).finished();  // strongly one-signed
  const Mat v = 0.001 * fixtures::random_psd(rng, 3);
  const auto kernel = fixtures::synthetic_kernel(b, v, 200.0);
  const PBounds pb = p_bounds(kernel);
  REQUIRE(pb.p_max < 0.5);  // never insignificant at 0.5
  const SignificanceReport rep =
      min_cost_significance_reversal(kernel, 0.5, CrossDirection::lose);
  CHECK(!rep.crossing.has_value());
}

TEST_CASE("significance reversal: losing significance costs more for tighter thresholds") {
  Rng rng(61);
  // Mildly mixed signs so p_max = 1 and both thresholds are crossable.
  const Vec b = (Vec(3) << 1.0, 0.5, -0.15).finished();
  const Mat v = 0.01 * fixtures::random_psd(rng, 3);
  const auto kernel = fixtures::synthetic_kernel(b, v, 150.0);
  const double p_id = p_value(kernel, kernel.identity_gaps());
  REQUIRE(p_id < 0.05);

  const SignificanceReport at_05 =
      min_cost_significance_reversal(kernel, 0.05, CrossDirection::lose);
  const SignificanceReport at_10 =
      min_cost_significance_reversal(kernel, 0.10, CrossDirection::lose);
  REQUIRE(at_05.crossing.has_value());
  REQUIRE(at_10.crossing.has_value());
  CHECK(at_05.crossing->min_cost.c <= at_10.crossing->min_cost.c + 1e-4);
}

TEST_CASE("significance reversal at the identity threshold is free") {
  Rng rng(12);
  const Vec b = (Vec(3) << 0.8, 0.6, 0.7).finished();
  const Mat v = 0.05 * fixtures::random_psd(rng, 3);
  const auto kernel = fixtures::synthetic_kernel(b, v, 90.0);
  const double p_id = p_value(kernel, kernel.identity_gaps());

  const SignificanceReport gain =
      min_cost_significance_reversal(kernel, p_id + 1e-12, CrossDirection::gain);
  REQUIRE(gain.crossing.has_value());
  CHECK(gain.crossing->min_cost.c == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("minimal significance-reversal cost agrees with the refined oracle") {
  // The oracle inverts the monotone budget -> extremized-p map: at each budget
  // the p extremum is a full-dimensional enumeration, so zoom refinement is
  // reliable; the crossing cost follows by bisection on the budget.
  Rng rng(2001);
  int checked = 0;
  for (int trial = 0; trial < 25 && checked < 8; ++trial) {
    const int cuts = 3;
    Vec b(cuts);
    for (int i = 0; i < cuts; ++i) b(i) = rng.normal();
    const Mat v = 0.05 * fixtures::random_psd(rng, cuts);
    const auto kernel = fixtures::synthetic_kernel(b, v, 60.0);
    const double p_id = p_value(kernel, kernel.identity_gaps());
    const double pi = 0.05;
    const Mat p_cost = cost_matrix(cuts + 1);
    const double mv = max_var(cuts + 1, kernel.range_value);

    const CrossDirection dir = p_id <= pi ? CrossDirection::lose : CrossDirection::gain;
    const SignificanceReport rep = min_cost_significance_reversal(kernel, pi, dir);

    auto extremized_p = [&](double budget_c) {
      gridrefine::Budget ball{p_cost, mv * budget_c * budget_c};
      auto p_of = [&](const Vec& w) {
        const double den = w.dot(v * w);
        if (den <= 0.0) return std::numeric_limits<double>::quiet_NaN();
        const double t = b.dot(w) / std::sqrt(den);
        return student_t_two_sided_p(t, 60.0);
      };
      const auto best = gridrefine::refined_oracle(cuts + 1, kernel.range_value, 50, p_of,
                                                   dir == CrossDirection::lose, &ball);
      return best.value;
    };

    if (!rep.crossing.has_value()) {
      // oracle must not cross either (checked at full budget)
      const double extreme = extremized_p(1.0);
      if (std::isfinite(extreme)) {
        if (dir == CrossDirection::lose) CHECK(extreme < pi + 1e-6);
        if (dir == CrossDirection::gain) CHECK(extreme > pi - 1e-6);
      }
      continue;
    }
    ++checked;

    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 12; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double p = extremized_p(mid);
      const bool crossed = std::isfinite(p) &&
                           (dir == CrossDirection::lose ? p >= pi : p <= pi);
      (crossed ? hi : lo) = mid;
    }
    CHECK(std::fabs(rep.crossing->min_cost.c - hi) <= 2e-3 + (hi - lo));
  }
  CHECK(checked >= 4);
}
