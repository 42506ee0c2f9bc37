#pragma once

#include "ordrobust/common.hpp"

#include <optional>

namespace ordrobust {

/// One affine constraint row a.w (= | >=) rhs.
struct ConstraintRow {
  Vec a;
  double rhs = 0.0;
};

/// minimize 0.5 w'Qw + lin.w  subject to  eq rows (=) and ineq rows (>=).
/// Q must be positive semidefinite on the null space of the equality rows.
struct QpProblem {
  Mat q;
  Vec lin;
  std::vector<ConstraintRow> eq;
  std::vector<ConstraintRow> ineq;
};

struct QpResult {
  Vec w;
  double objective = 0.0;
  double kkt_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Primal active-set solver. `start` must satisfy all constraints (equalities
/// within 1e-8, inequalities within 1e-10 of feasibility). Pivoting is by
/// lowest index so results are reproducible.
QpResult solve_qp(const QpProblem& problem, const Vec& start, int max_iterations = 0);

/// Gap-slice feasible set: sum(w) = range, w_k >= floor_k.
struct GapPolytope {
  double range = 0.0;
  Vec floor;

  int dim() const { return static_cast<int>(floor.size()); }
  /// Vertex with all slack mass on coordinate j.
  Vec vertex(int j) const;
  /// Center point (equal slack distribution).
  Vec center() const;
  bool contains(const Vec& w, double tol = 1e-9) const;
  void append_to(QpProblem& problem) const;
};

GapPolytope gap_polytope(int n_gaps, double range, double floor_value);
GapPolytope gap_polytope(double range, const Vec& floor);

/// maximize/minimize c.w over the polytope (closed form: all slack mass on the
/// best coordinate, lowest index wins ties).
struct LinearExtreme {
  Vec w;
  double value = 0.0;
  int vertex_index = 0;
};
LinearExtreme extremize_linear(const Vec& c, const GapPolytope& polytope, bool maximize);

/// Solves `problem` with the extra convex-quadratic constraint w'Bw <= rhs via
/// exact multiplier bisection (the map from the multiplier to the constraint
/// value at the penalized optimum is monotone). B must be PSD. Returns nullopt
/// when even the B-minimal point violates the budget. `mu_state`, when given,
/// carries the active multiplier across related solves to seed the bracket.
std::optional<QpResult> solve_qp_budget(const QpProblem& problem, const Mat& b_quad,
                                        double rhs, const Vec& start,
                                        double tol_rel = 1e-9, double* mu_state = nullptr);

}  // namespace ordrobust
