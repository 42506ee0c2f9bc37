#include "ordrobust/qp.hpp"

#include "ordrobust/cost.hpp"
#include "ordrobust/fractional.hpp"
#include "ordrobust/grid.hpp"

#include <doctest.h>

#include <cmath>

using namespace ordrobust;

namespace {

QpProblem variance_problem(const GapPolytope& polytope, int k) {
  QpProblem qp;
  qp.q = 2.0 * cost_matrix(k);
  qp.lin = Vec::Zero(k - 1);
  polytope.append_to(qp);
  return qp;
}

}  // namespace

TEST_CASE("minimizing gap variance on the slice centers the gaps") {
  for (const int k : {3, 5, 11}) {
    const GapPolytope polytope = gap_polytope(k - 1, 10.0, default_epsilon_gap(k, 10.0));
    QpProblem qp = variance_problem(polytope, k);
    const QpResult res = solve_qp(qp, polytope.vertex(0));
    CHECK(res.converged);
    CHECK(res.objective == doctest::Approx(0.0).epsilon(1e-12));
    CHECK((res.w.array() - 10.0 / (k - 1)).abs().maxCoeff() < 1e-9);
    CHECK(res.kkt_residual < 1e-8);
  }
}

TEST_CASE("hand KKT: K=3 sign-reversal boundary") {
  // beta^(d) = (-0.5, +0.2)  =>  b = (0.5, -0.2); boundary b.w = 0 with
  // w1 + w2 = 2 gives w = (4/7, 10/7) and Var = 9/49.
  const GapPolytope polytope = gap_polytope(2, 2.0, default_epsilon_gap(3, 2.0));
  Vec b(2);
  b << 0.5, -0.2;
  auto res = min_variance_on_boundary(b, cost_matrix(3), polytope);
  REQUIRE(res.has_value());
  CHECK(res->w(0) == doctest::Approx(4.0 / 7.0).epsilon(1e-9));
  CHECK(res->w(1) == doctest::Approx(10.0 / 7.0).epsilon(1e-9));
  CHECK(res->w.dot(cost_matrix(3) * res->w) == doctest::Approx(9.0 / 49.0).epsilon(1e-9));
  CHECK(res->kkt_residual < 1e-8);
}

TEST_CASE("random convex objectives match the grid oracle") {
  Rng rng(11);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 3 + rng.uniform_int(3);  // K in {3,4,5}
    const int n = k - 1;
    const double range = 1.0 + 9.0 * rng.uniform();
    const int resolution = k == 3 ? 1200 : (k == 4 ? 260 : 110);

    Mat a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
    Mat q = a.transpose() * a;  // PSD
    Vec lin(n);
    for (int i = 0; i < n; ++i) lin(i) = rng.normal();

    // Floor at one lattice step so the grid and the QP share a feasible set.
    const GapPolytope polytope = gap_polytope(n, range, range / resolution);
    QpProblem qp;
    qp.q = q;
    qp.lin = lin;
    polytope.append_to(qp);
    const QpResult res = solve_qp(qp, polytope.center());
    CHECK(res.converged);
    CHECK(res.kkt_residual < 1e-8);

    auto objective = [&](const Vec& w) { return 0.5 * w.dot(q * w) + lin.dot(w); };
    GridBest grid = grid_oracle(k, range, resolution, objective, false);
    // Exact optimum must not exceed the lattice value and the lattice must
    // come within a one-step Lipschitz bound of it.
    CHECK(res.objective <= grid.value + 1e-9);
    const double step = range / resolution * std::sqrt(static_cast<double>(n));
    const double lipschitz = (q * res.w + lin).norm() + q.norm() * step;
    CHECK(grid.value - res.objective <= 2.0 * step * lipschitz + 1e-9);
  }
}

TEST_CASE("random restarts land on the same objective") {
  Rng rng(5);
  const int k = 5;
  const int n = k - 1;
  Mat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  const Mat q = a.transpose() * a;
  Vec lin(n);
  for (int i = 0; i < n; ++i) lin(i) = rng.normal();
  const GapPolytope polytope = gap_polytope(n, 4.0, 1e-7);
  QpProblem qp;
  qp.q = q;
  qp.lin = lin;
  polytope.append_to(qp);

  const double ref = solve_qp(qp, polytope.center()).objective;
  for (int j = 0; j < n; ++j) {
    CHECK(solve_qp(qp, polytope.vertex(j)).objective == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("linear extremes put the slack on the best coordinate") {
  const GapPolytope polytope = gap_polytope(4, 8.0, 0.25);
  Vec c(4);
  c << 0.3, -1.0, 2.0, 2.0;
  const LinearExtreme hi = extremize_linear(c, polytope, true);
  CHECK(hi.vertex_index == 2);  // lowest index wins the tie
  const LinearExtreme lo = extremize_linear(c, polytope, false);
  CHECK(lo.vertex_index == 1);
  CHECK(hi.value == doctest::Approx(c.dot(hi.w)));
  CHECK(polytope.contains(hi.w));
}

TEST_CASE("budget wrapper enforces the quadratic constraint exactly") {
  const int k = 4;
  const int n = k - 1;
  const GapPolytope polytope = gap_polytope(n, 6.0, 1e-6);
  const Mat p = cost_matrix(k);
  Vec b(n);
  b << 1.0, -0.4, 0.1;

  QpProblem qp;
  qp.q = Mat::Zero(n, n);
  qp.lin = -b;  // maximize b.w
  polytope.append_to(qp);

  const double budget = 0.3 * max_var(k, 6.0);
  auto res = solve_qp_budget(qp, p, budget, polytope.center());
  REQUIRE(res.has_value());
  const double var = res->w.dot(p * res->w);
  CHECK(var <= budget * (1.0 + 1e-7));
  CHECK(var == doctest::Approx(budget).epsilon(1e-6));  // constraint binds here

  auto objective = [&](const Vec& w) {
    return w.dot(p * w) <= budget ? -b.dot(w) : 1e100;
  };
  GridBest grid = grid_oracle(k, 6.0, 240, objective, false);
  CHECK(b.dot(res->w) >= -grid.value - 1e-9);
}

TEST_CASE("unbudgeted linear program stays at a vertex under the wrapper") {
  const int n = 3;
  const GapPolytope polytope = gap_polytope(n, 6.0, 0.001);
  QpProblem qp;
  qp.q = Mat::Zero(n, n);
  Vec b(n);
  b << -1.0, 2.0, 0.5;
  qp.lin = -b;
  polytope.append_to(qp);
  auto res = solve_qp_budget(qp, cost_matrix(4), max_var(4, 6.0) * 2.0, polytope.center());
  REQUIRE(res.has_value());
  CHECK(b.dot(res->w) == doctest::Approx(b.dot(extremize_linear(b, polytope, true).w)));
}
