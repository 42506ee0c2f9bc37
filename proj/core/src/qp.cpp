#include "ordrobust/qp.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <limits>

namespace ordrobust {

namespace {

constexpr double kStepTol = 1e-12;
constexpr double kMultTol = 1e-10;
constexpr double kActiveTol = 1e-10;

// Orthonormal basis of the null space of A (rows are constraints). Column
// pivoting keeps the basis valid for rank-deficient working sets.
Mat null_space(const Mat& a, int n) {
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::ColPivHouseholderQR<Mat> qr(a.transpose());
  const int rank = static_cast<int>(qr.rank());
  if (rank >= n) return Mat(n, 0);
  Mat q = qr.householderQ();
  return q.rightCols(n - rank);
}

}  // namespace

Vec GapPolytope::vertex(int j) const {
  Vec w = floor;
  w(j) += range - floor.sum();
  return w;
}

Vec GapPolytope::center() const {
  const int n = dim();
  Vec w = floor;
  w.array() += (range - floor.sum()) / n;
  return w;
}

bool GapPolytope::contains(const Vec& w, double tol) const {
  if (std::fabs(w.sum() - range) > tol * std::max(1.0, std::fabs(range))) return false;
  return ((w - floor).array() >= -tol).all();
}

void GapPolytope::append_to(QpProblem& problem) const {
  const int n = dim();
  ConstraintRow sum_row;
  sum_row.a = Vec::Ones(n);
  sum_row.rhs = range;
  problem.eq.push_back(sum_row);
  for (int k = 0; k < n; ++k) {
    ConstraintRow row;
    row.a = Vec::Zero(n);
    row.a(k) = 1.0;
    row.rhs = floor(k);
    problem.ineq.push_back(row);
  }
}

GapPolytope gap_polytope(int n_gaps, double range, double floor_value) {
  GapPolytope p;
  p.range = range;
  p.floor = Vec::Constant(n_gaps, floor_value);
  if (p.floor.sum() > range)
    throw ValidationError("gap polytope: floor exceeds the scale range");
  return p;
}

GapPolytope gap_polytope(double range, const Vec& floor) {
  GapPolytope p;
  p.range = range;
  p.floor = floor;
  if (p.floor.sum() > range)
    throw ValidationError("gap polytope: floor exceeds the scale range");
  return p;
}

LinearExtreme extremize_linear(const Vec& c, const GapPolytope& polytope, bool maximize) {
  const int n = polytope.dim();
  const double slack = polytope.range - polytope.floor.sum();
  int best = 0;
  for (int j = 1; j < n; ++j) {
    const double cur = maximize ? c(j) : -c(j);
    const double bst = maximize ? c(best) : -c(best);
    if (cur > bst + 0.0) best = j;  // strict improvement keeps lowest index on ties
  }
  LinearExtreme out;
  out.vertex_index = best;
  out.w = polytope.floor;
  out.w(best) += slack;
  out.value = c.dot(out.w);
  return out;
}

namespace {

QpResult solve_qp_attempt(const QpProblem& problem, const Vec& start, int max_iterations) {
  const int n = static_cast<int>(start.size());
  const int n_eq = static_cast<int>(problem.eq.size());
  const int n_in = static_cast<int>(problem.ineq.size());
  if (max_iterations <= 0) max_iterations = 100 * (n + n_in + 1);

  const double scale =
      1.0 + problem.q.cwiseAbs().maxCoeff() + problem.lin.cwiseAbs().maxCoeff();

  Vec w = start;

  // Working set over inequality indices; equalities are always active.
  std::vector<bool> active(n_in, false);
  for (int i = 0; i < n_in; ++i) {
    const double slack = problem.ineq[i].a.dot(w) - problem.ineq[i].rhs;
    if (slack <= kActiveTol * (1.0 + std::fabs(problem.ineq[i].rhs))) active[i] = true;
  }

  QpResult res;
  int last_dropped = -1;
  int cycle_hits = 0;
  int stalled = 0;
  double prev_objective = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iterations; ++iter) {
    res.iterations = iter + 1;
    {
      const double objective = 0.5 * w.dot(problem.q * w) + problem.lin.dot(w);
      if (objective < prev_objective - 1e-14 * scale * (1.0 + std::fabs(prev_objective))) {
        stalled = 0;
      } else {
        ++stalled;
      }
      prev_objective = std::min(prev_objective, objective);
    }

    // Working set pruned to a maximal independent subset (lowest index first):
    // dependent rows make the multipliers non-unique and the drop decision
    // meaningless. Equalities always stay; dependent inequalities keep an
    // implicit zero multiplier.
    std::vector<int> working;
    {
      Mat basis(n_eq + std::min(n, n_in), n);
      int basis_rows = 0;
      auto independent = [&](const Vec& row) {
        Vec r = row;
        for (int b = 0; b < basis_rows; ++b) r -= basis.row(b).dot(row) * basis.row(b);
        const double norm = r.norm();
        if (norm <= 1e-10 * (1.0 + row.norm())) return false;
        basis.row(basis_rows++) = r.transpose() / norm;
        return true;
      };
      for (int i = 0; i < n_eq; ++i) independent(problem.eq[i].a);
      for (int i = 0; i < n_in; ++i) {
        if (!active[i]) continue;
        if (basis_rows >= n) break;
        if (independent(problem.ineq[i].a)) working.push_back(i);
      }
    }

    Mat a(n_eq + static_cast<int>(working.size()), n);
    for (int i = 0; i < n_eq; ++i) a.row(i) = problem.eq[i].a.transpose();
    for (std::size_t i = 0; i < working.size(); ++i)
      a.row(n_eq + static_cast<int>(i)) = problem.ineq[working[i]].a.transpose();

    const Vec g = problem.q * w + problem.lin;

    Mat z = null_space(a, n);
    Vec p = Vec::Zero(n);
    bool ray_step = false;

    if (z.cols() > 0) {
      const Mat h = z.transpose() * problem.q * z;
      const Vec gz = z.transpose() * g;
      Eigen::SelfAdjointEigenSolver<Mat> eig(h);
      const Vec evals = eig.eigenvalues();
      const Mat evecs = eig.eigenvectors();
      const double curvature_tol = 1e-12 * (1.0 + evals.cwiseAbs().maxCoeff());

      // Zero-curvature descent ray takes priority: the objective is affine
      // along it and decreases until a constraint blocks.
      Vec ray = Vec::Zero(z.cols());
      for (int j = 0; j < evals.size(); ++j) {
        if (evals(j) <= curvature_tol) {
          const double comp = evecs.col(j).dot(gz);
          if (std::fabs(comp) > 1e-10 * scale) ray -= comp * evecs.col(j);
        }
      }
      if (ray.norm() > 1e-10 * scale) {
        p = z * ray;
        ray_step = true;
      } else {
        Vec pz = Vec::Zero(z.cols());
        for (int j = 0; j < evals.size(); ++j) {
          if (evals(j) > curvature_tol) pz -= (evecs.col(j).dot(gz) / evals(j)) * evecs.col(j);
        }
        p = z * pz;
      }
    }

    // Stationarity test on the predicted decrease, not the step norm: an
    // ill-conditioned reduced Hessian turns the Newton step into noise whose
    // norm stays well above machine epsilon.
    const double predicted_decrease = -(g.dot(p) + 0.5 * p.dot(problem.q * p));
    const bool stationary =
        p.cwiseAbs().maxCoeff() <= kStepTol * (1.0 + w.cwiseAbs().maxCoeff()) ||
        (!ray_step && predicted_decrease <= 1e-15 * scale * (1.0 + w.cwiseAbs().maxCoeff()));
    if (!ray_step && stationary) {
      // KKT candidate: recover multipliers for the working inequalities.
      Mat at = a.transpose();
      Eigen::CompleteOrthogonalDecomposition<Mat> cod(at);
      const Vec lambda = cod.solve(g);

      int drop = -1;
      for (std::size_t i = 0; i < working.size(); ++i) {
        if (lambda(n_eq + static_cast<int>(i)) < -kMultTol * scale) {
          drop = working[i];  // Bland: lowest working index first
          break;
        }
      }
      // Degenerate drops promise improvements below numeric resolution: the
      // same row bouncing, or a long run of zero-progress pivots. Accept the
      // point instead of cycling; the residual reports the leftover
      // multiplier honestly.
      if (drop >= 0) {
        cycle_hits = drop == last_dropped ? cycle_hits + 1 : 0;
        if (cycle_hits >= 2 || stalled > 30 + 4 * n) drop = -1;
      }
      if (drop < 0) {
        res.w = w;
        res.objective = 0.5 * w.dot(problem.q * w) + problem.lin.dot(w);
        Vec lambda_clipped = lambda;  // equality multipliers keep their sign
        for (int i = n_eq; i < lambda_clipped.size(); ++i)
          lambda_clipped(i) = std::max(0.0, lambda_clipped(i));
        const Vec stat = g - at * lambda_clipped;
        res.kkt_residual = stat.cwiseAbs().maxCoeff() / scale;
        res.converged = true;
        return res;
      }
      last_dropped = drop;
      active[drop] = false;
      continue;
    }

    // Step length: full step for the Newton step, ray until blocked otherwise.
    double alpha = ray_step ? std::numeric_limits<double>::infinity() : 1.0;
    int blocking = -1;
    for (int i = 0; i < n_in; ++i) {
      if (active[i]) continue;
      const double ap = problem.ineq[i].a.dot(p);
      if (ap >= -1e-14 * scale) continue;
      const double slack = problem.ineq[i].a.dot(w) - problem.ineq[i].rhs;
      const double step = std::max(0.0, slack) / (-ap);
      if (step < alpha - 1e-14) {
        alpha = step;
        blocking = i;
      }
    }
    if (!std::isfinite(alpha))
      throw NumericError("solve_qp: unbounded ray on a non-compact feasible set");

    w += alpha * p;
    if (blocking >= 0) active[blocking] = true;
  }

  throw NumericError("solve_qp: iteration cap exceeded");
}

}  // namespace

QpResult solve_qp(const QpProblem& problem, const Vec& start, int max_iterations) {
  // Degenerate working sets can cycle the active-set iteration. Retries break
  // the degeneracy deterministically: a tiny ridge makes every subproblem
  // minimizer unique, and loosening the inequality right-hand sides by
  // index-graded slacks splits coincident vertices. Results are reported
  // against the original objective; the rhs slack is O(1e-10) relative.
  const double q_scale = 1.0 + problem.q.cwiseAbs().maxCoeff();
  for (const int attempt_id : {0, 1, 2}) {
    QpProblem attempt = problem;
    if (attempt_id >= 1) {
      attempt.q += 1e-11 * q_scale * Mat::Identity(attempt.q.rows(), attempt.q.cols());
    }
    if (attempt_id >= 2) {
      const int m = static_cast<int>(attempt.ineq.size());
      for (int i = 0; i < m; ++i) {
        attempt.ineq[i].rhs -=
            1e-10 * (1.0 + std::fabs(attempt.ineq[i].rhs)) * (i + 1.0) / (m + 1.0);
      }
    }
    try {
      QpResult res = solve_qp_attempt(attempt, start, max_iterations);
      if (attempt_id > 0) {
        res.objective = 0.5 * res.w.dot(problem.q * res.w) + problem.lin.dot(res.w);
      }
      return res;
    } catch (const NumericError&) {
      if (attempt_id == 2) throw;
    }
  }
  throw NumericError("solve_qp: iteration cap exceeded");
}

std::optional<QpResult> solve_qp_budget(const QpProblem& problem, const Mat& b_quad,
                                        double rhs, const Vec& start, double tol_rel,
                                        double* mu_state) {
  const double budget_scale = 1.0 + std::fabs(rhs);
  Vec warm = start;
  auto solve_mu = [&](double mu) {
    QpProblem p = problem;
    p.q = problem.q + 2.0 * mu * b_quad;
    QpResult r = solve_qp(p, warm);
    warm = r.w;  // same feasible set at every mu
    return r;
  };
  auto quad_value = [&](const QpResult& r) { return r.w.dot(b_quad * r.w); };
  auto finish = [&](QpResult r, double mu) {
    if (mu_state) *mu_state = mu;
    r.objective = 0.5 * r.w.dot(problem.q * r.w) + problem.lin.dot(r.w);
    return r;
  };

  double mu_lo = 0.0;
  double mu_hi = 1.0;
  const double hint = mu_state ? *mu_state : 0.0;
  if (hint > 0.0) {
    // Test the carried multiplier first; when the constraint is active there
    // within tolerance this costs a single solve.
    QpResult r = solve_mu(hint);
    const double qv = quad_value(r);
    if (qv <= rhs + tol_rel * budget_scale) {
      if (qv >= rhs - tol_rel * budget_scale) return finish(r, hint);
      mu_hi = hint;  // budget slack: the active multiplier sits below the hint
    } else {
      mu_lo = hint;
      mu_hi = 8.0 * hint;
    }
  } else {
    QpResult at_zero = solve_qp(problem, start);
    if (quad_value(at_zero) <= rhs + tol_rel * budget_scale) return finish(at_zero, 0.0);
  }

  // Bracket the active multiplier.
  QpResult at_hi;
  for (int grow = 0;; ++grow) {
    at_hi = solve_mu(mu_hi);
    if (quad_value(at_hi) <= rhs + tol_rel * budget_scale) break;
    mu_lo = mu_hi;
    mu_hi *= 8.0;
    if (mu_hi > 1e18 || grow >= 80)
      return std::nullopt;  // budget unattainable under the constraints
  }

  QpResult best = at_hi;
  double best_mu = mu_hi;
  for (int it = 0; it < 200; ++it) {
    const double mu = 0.5 * (mu_lo + mu_hi);
    QpResult r = solve_mu(mu);
    const double qv = quad_value(r);
    if (qv <= rhs + tol_rel * budget_scale) {
      best = r;
      best_mu = mu;
      mu_hi = mu;
      if (qv >= rhs - tol_rel * budget_scale) break;  // active within tolerance
    } else {
      mu_lo = mu;
    }
    if (mu_hi - mu_lo <= 1e-15 * (1.0 + mu_hi)) break;
  }
  return finish(best, best_mu);
}

}  // namespace ordrobust
