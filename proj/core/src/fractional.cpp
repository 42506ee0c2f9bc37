#include "ordrobust/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ordrobust {

namespace {

constexpr int kMaxDinkelbach = 200;
constexpr int kMaxCuts = 200;

double t2_of(const TsqProblem& pr, const Vec& w, bool* degenerate = nullptr) {
  const double num = pr.b.dot(w);
  const double den = w.dot(pr.v * w);
  const double scale = pr.v.cwiseAbs().maxCoeff() * w.squaredNorm();
  if (den <= 1e-14 * (1.0 + scale)) {
    if (degenerate) *degenerate = true;
    return num * num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return num * num / den;
}

// PSD square root factor R with R'R = m (eigenvalues clipped at zero).
Mat psd_sqrt(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> eig(m);
  Vec vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return vals.asDiagonal() * eig.eigenvectors().transpose();
}

// Conified polytope: rays of {sum w = L, w >= floor} are v with
// v_k - (floor_k / L) * sum(v) >= 0.
std::vector<ConstraintRow> cone_rows(const GapPolytope& polytope) {
  const int n = polytope.dim();
  std::vector<ConstraintRow> rows;
  rows.reserve(n);
  for (int k = 0; k < n; ++k) {
    ConstraintRow row;
    row.a = Vec::Constant(n, -polytope.floor(k) / polytope.range);
    row.a(k) += 1.0;
    row.rhs = 0.0;
    rows.push_back(row);
  }
  return rows;
}

Vec cone_to_gaps(const GapPolytope& polytope, const Vec& v) {
  return v * (polytope.range / v.sum());
}

// Supporting-hyperplane hygiene: successive cuts converge to the same tangent
// plane, so near-parallel ones are replaced rather than accumulated.
void push_or_replace_cut(QpProblem& qp, const ConstraintRow& row, int base_rows) {
  const double norm = row.a.norm();
  for (std::size_t i = base_rows; i < qp.ineq.size(); ++i) {
    const double cos = qp.ineq[i].a.dot(row.a) / (qp.ineq[i].a.norm() * norm);
    if (cos > 1.0 - 1e-9) {
      qp.ineq[i] = row;
      return;
    }
  }
  qp.ineq.push_back(row);
}

// Feasible point on branch s inside the budget, or empty when none exists.
std::optional<Vec> branch_anchor(const TsqProblem& pr, int s,
                                 std::optional<double> var_budget) {
  const Vec center = pr.polytope.center();
  const double tol = 1e-13 * (1.0 + pr.b.cwiseAbs().maxCoeff()) * pr.polytope.range;
  if (s * pr.b.dot(center) > tol) return center;  // center has zero cost

  // The center sits on the other side: walk from the cheapest boundary point
  // toward the branch's best vertex.
  auto boundary = min_variance_on_boundary(pr.b, pr.p_cost, pr.polytope);
  if (!boundary) return std::nullopt;
  const double boundary_var = boundary->w.dot(pr.p_cost * boundary->w);
  if (var_budget && boundary_var >= *var_budget * (1.0 - 1e-12)) return std::nullopt;

  const LinearExtreme ext = extremize_linear(s == 1 ? pr.b : Vec(-pr.b), pr.polytope, true);
  if (s * pr.b.dot(ext.w) <= tol) return std::nullopt;
  for (double t = 1.0; t >= 1e-12; t *= 0.5) {
    Vec w = boundary->w + t * (ext.w - boundary->w);
    const double var = w.dot(pr.p_cost * w);
    if (s * pr.b.dot(w) > tol && (!var_budget || var <= *var_budget * (1.0 - 1e-12))) return w;
  }
  return std::nullopt;
}

struct BranchResult {
  bool feasible = false;
  Vec w;
  double t2 = 0.0;
  bool degenerate = false;
  bool converged = true;
  int iterations = 0;
};

// max t^2 on branch {s.b.w > 0}: minimize v'Vv subject to s.b.v = 1 on the
// conified polytope; the budget cone enters through supporting-hyperplane cuts.
BranchResult max_t2_branch(const TsqProblem& pr, int s, std::optional<double> var_budget) {
  BranchResult out;
  const int n = pr.polytope.dim();
  const Vec sb = s == 1 ? pr.b : Vec(-pr.b);

  const LinearExtreme ext = extremize_linear(sb, pr.polytope, true);
  const double tol = 1e-13 * (1.0 + pr.b.cwiseAbs().maxCoeff()) * pr.polytope.range;
  if (ext.value <= tol) return out;  // branch empty

  std::optional<Vec> anchor_w;
  if (var_budget) {
    anchor_w = branch_anchor(pr, s, var_budget);
    if (!anchor_w) return out;
  } else {
    anchor_w = ext.w;
  }
  Vec anchor_v = *anchor_w / sb.dot(*anchor_w);

  QpProblem qp;
  qp.q = 2.0 * pr.v;
  qp.lin = Vec::Zero(n);
  ConstraintRow eq;
  eq.a = sb;
  eq.rhs = 1.0;
  qp.eq.push_back(eq);
  qp.ineq = cone_rows(pr.polytope);

  const Mat r_cost = var_budget ? psd_sqrt(pr.p_cost) : Mat();
  const double rho = var_budget ? std::sqrt(std::max(0.0, *var_budget)) / pr.polytope.range : 0.0;

  Vec v = anchor_v;
  out.feasible = true;
  const int base_rows = static_cast<int>(qp.ineq.size());
  for (int cut = 0; cut <= kMaxCuts; ++cut) {
    QpResult res = solve_qp(qp, v.size() == n ? v : anchor_v);
    out.iterations += res.iterations;
    if (!var_budget) {
      v = res.w;
      break;
    }
    // Budget cone: ||R v|| <= rho * sum(v).
    const Vec rv = r_cost * res.w;
    const double lhs = rv.norm();
    const double rhs = rho * res.w.sum();
    if (lhs <= rhs * (1.0 + 1e-9) + 1e-13) {
      v = res.w;
      break;
    }
    if (cut == kMaxCuts) {
      out.converged = false;
      v = anchor_v;
      break;
    }
    ConstraintRow row;
    row.a = rho * Vec::Ones(n) - r_cost.transpose() * (rv / lhs);
    row.rhs = 0.0;
    push_or_replace_cut(qp, row, base_rows);
    v = anchor_v;  // restart from a point inside the true cone
  }

  const double q_val = v.dot(pr.v * v);
  if (q_val <= 1e-13) {
    out.degenerate = true;
    out.t2 = std::numeric_limits<double>::infinity();
  } else {
    out.t2 = 1.0 / q_val;
  }
  out.w = cone_to_gaps(pr.polytope, v);
  return out;
}

// Pulls a point straight toward the (zero-variance) center until it obeys the
// budget; Var(center + theta*d) = theta^2 Var(d), so the scaling is exact.
Vec project_into_budget(const TsqProblem& pr, const Vec& w, double var_budget) {
  const Vec c = pr.polytope.center();
  const Vec d = w - c;
  const double var = d.dot(pr.p_cost * d);
  if (var <= var_budget) return w;
  const double theta = std::sqrt(std::max(0.0, var_budget) / var) * (1.0 - 1e-9);
  return c + theta * d;
}

std::vector<Vec> default_seeds(const TsqProblem& pr, std::optional<double> var_budget) {
  std::vector<Vec> seeds;
  auto push = [&](Vec w) {
    if (var_budget) w = project_into_budget(pr, w, *var_budget);
    seeds.push_back(std::move(w));
  };
  const int n = pr.polytope.dim();
  push(pr.polytope.center());
  for (int j = 0; j < n; ++j) push(pr.polytope.vertex(j));
  // Mid-face rays: the budgeted descent sometimes bottoms out between two
  // single-jump directions. The quadratic fan-out is only worth it at small
  // dimension; larger scales keep the vertex and warm-start seeds.
  if (n <= 8) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        push(0.5 * (pr.polytope.vertex(i) + pr.polytope.vertex(j)));
      }
    }
  }
  return seeds;
}

}  // namespace

double sign_tolerance(const Vec& b) { return 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()); }

bool signs_mixed(const Vec& b, double tol) {
  bool pos = false;
  bool neg = false;
  for (int i = 0; i < b.size(); ++i) {
    if (b(i) > tol) pos = true;
    if (b(i) < -tol) neg = true;
  }
  return pos && neg;
}

std::optional<QpResult> min_variance_on_boundary(const Vec& b, const Mat& p_cost,
                                                 const GapPolytope& polytope) {
  const int n = polytope.dim();
  // Feasible start: convex combination of vertices that straddle b.w = 0.
  int j_pos = -1;
  int j_neg = -1;
  double best_pos = 0.0;
  double best_neg = 0.0;
  for (int j = 0; j < n; ++j) {
    const double val = b.dot(polytope.vertex(j));
    if (val > best_pos) {
      best_pos = val;
      j_pos = j;
    }
    if (val < best_neg) {
      best_neg = val;
      j_neg = j;
    }
  }
  if (j_pos < 0 || j_neg < 0) return std::nullopt;
  const Vec wp = polytope.vertex(j_pos);
  const Vec wn = polytope.vertex(j_neg);
  const double theta = best_pos / (best_pos - best_neg);
  Vec start = (1.0 - theta) * wp + theta * wn;

  QpProblem qp;
  qp.q = 2.0 * p_cost;
  qp.lin = Vec::Zero(n);
  polytope.append_to(qp);
  ConstraintRow boundary;
  boundary.a = b;
  boundary.rhs = 0.0;
  qp.eq.push_back(boundary);
  return solve_qp(qp, start);
}

TsqResult max_t2(const TsqProblem& problem, std::optional<double> var_budget) {
  TsqResult out;
  bool any = false;
  for (const int s : {+1, -1}) {
    BranchResult br = max_t2_branch(problem, s, var_budget);
    if (!br.feasible) continue;
    out.iterations += br.iterations;
    if (!any || br.t2 > out.t2) {
      out.w = br.w;
      out.t2 = br.t2;
      out.degenerate = br.degenerate;
      out.converged = br.converged;
      any = true;
    }
  }
  if (!any) {
    // b vanishes (or the budget excludes both branches): t^2 is identically 0
    // wherever feasible.
    out.w = problem.polytope.center();
    out.t2 = 0.0;
  }
  return out;
}

TsqResult min_t2(const TsqProblem& problem, std::optional<double> var_budget,
                 const std::vector<Vec>& warm_starts) {
  TsqResult out;
  const double tol = sign_tolerance(problem.b);

  if (signs_mixed(problem.b, tol)) {
    auto boundary = min_variance_on_boundary(problem.b, problem.p_cost, problem.polytope);
    if (boundary) {
      const double var = boundary->w.dot(problem.p_cost * boundary->w);
      if (!var_budget || var <= *var_budget * (1.0 + 1e-9) + 1e-13) {
        out.w = boundary->w;
        out.t2 = 0.0;
        return out;
      }
    }
  } else if (!var_budget) {
    // Uniform signs keep b.w single-signed over the polytope, so t^2 is
    // quasiconcave there and its minimum sits at a vertex.
    bool first = true;
    for (int j = 0; j < problem.polytope.dim(); ++j) {
      const Vec w = problem.polytope.vertex(j);
      bool degenerate = false;
      const double val = t2_of(problem, w, &degenerate);
      if (degenerate) continue;
      if (first || val < out.t2) {
        out.w = w;
        out.t2 = val;
        first = false;
      }
    }
    if (!first) return out;
    out.w = problem.polytope.center();
    out.t2 = t2_of(problem, out.w);
    return out;
  }

  // Budgeted interior case: multi-start Dinkelbach descent.
  DinkelbachResult d = dinkelbach_max_ratio(problem, var_budget, false, warm_starts);
  out.w = d.w;
  out.t2 = d.ratio;
  out.converged = d.converged;
  out.iterations = d.iterations;
  return out;
}

std::optional<QpResult> min_variance_for_t2(const TsqProblem& problem, double tau) {
  if (tau <= 0.0) {
    QpResult res;
    res.w = problem.polytope.center();
    res.objective = 0.0;
    res.converged = true;
    return res;
  }
  const int n = problem.polytope.dim();
  const Mat r_v = psd_sqrt(tau * problem.v);

  std::optional<QpResult> best;
  for (const int s : {+1, -1}) {
    // Anchor: the branch t^2 maximizer certifies attainability of tau.
    BranchResult anchor_branch = max_t2_branch(problem, s, std::nullopt);
    if (!anchor_branch.feasible || anchor_branch.t2 < tau) continue;
    const Vec anchor = anchor_branch.w;
    const Vec sb = s == 1 ? problem.b : Vec(-problem.b);

    QpProblem qp;
    qp.q = 2.0 * problem.p_cost;
    qp.lin = Vec::Zero(n);
    problem.polytope.append_to(qp);
    const int base_rows = static_cast<int>(qp.ineq.size());

    QpResult res;
    bool ok = false;
    for (int cut = 0; cut <= kMaxCuts; ++cut) {
      res = solve_qp(qp, anchor);
      const Vec rw = r_v * res.w;
      const double lhs = sb.dot(res.w);
      const double rhs = rw.norm();
      if (lhs >= rhs * (1.0 - 1e-9) - 1e-13) {
        ok = true;
        break;
      }
      ConstraintRow row;
      row.a = sb - r_v.transpose() * (rw / std::max(rhs, 1e-300));
      row.rhs = 0.0;
      push_or_replace_cut(qp, row, base_rows);
    }
    if (!ok) continue;
    if (!best || res.objective < best->objective) best = res;
  }
  return best;
}

DinkelbachResult dinkelbach_max_ratio(const TsqProblem& problem,
                                      std::optional<double> var_budget, bool maximize,
                                      const std::vector<Vec>& warm_starts) {
  std::vector<Vec> seeds = default_seeds(problem, var_budget);
  seeds.insert(seeds.end(), warm_starts.begin(), warm_starts.end());

  DinkelbachResult best;
  bool have_best = false;

  double mu_state = 0.0;  // carries the budget multiplier across inner solves
  for (Vec seed : seeds) {
    if (var_budget) seed = project_into_budget(problem, seed, *var_budget);
    if (!problem.polytope.contains(seed)) continue;
    Vec w = seed;
    bool degenerate = false;
    double lambda = t2_of(problem, w, &degenerate);
    if (degenerate || !std::isfinite(lambda)) continue;
    bool converged = false;
    int iters = 0;
    for (int it = 0; it < kMaxDinkelbach; ++it) {
      ++iters;
      // Convexified Dinkelbach step: the concave side of
      // (b.w)^2 - lambda w'Vw is linearized at the incumbent.
      QpProblem qp;
      if (maximize) {
        qp.q = 2.0 * lambda * problem.v;
        qp.lin = -2.0 * problem.b.dot(w) * problem.b;
      } else {
        qp.q = 2.0 * problem.b * problem.b.transpose();
        qp.lin = -2.0 * lambda * (problem.v * w);
      }
      problem.polytope.append_to(qp);

      Vec next;
      if (var_budget) {
        auto res = solve_qp_budget(qp, problem.p_cost, *var_budget, w, 1e-7, &mu_state);
        if (!res) break;
        next = res->w;
      } else {
        next = solve_qp(qp, w).w;
      }
      bool deg = false;
      const double next_lambda = t2_of(problem, next, &deg);
      if (deg || !std::isfinite(next_lambda)) break;
      const double improve = maximize ? next_lambda - lambda : lambda - next_lambda;
      if (improve <= 1e-12 * (1.0 + std::fabs(lambda))) {
        // keep the incumbent pair; a numerically non-improving step is done
        converged = true;
        break;
      }
      w = next;
      lambda = next_lambda;
    }
    const bool better = !have_best || (maximize ? lambda > best.ratio : lambda < best.ratio);
    if (better) {
      best.w = w;
      best.ratio = lambda;
      best.iterations = iters;
      best.converged = converged;
      have_best = true;
    }
  }

  if (!have_best) {
    best.w = problem.polytope.center();
    best.ratio = t2_of(problem, best.w);
    best.converged = true;
  }
  return best;
}

}  // namespace ordrobust
