#pragma once

#include <vector>

namespace ordrobust {

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with dof degrees of freedom.
double student_t_cdf(double t, double dof);

/// Two-sided p-value for a t statistic: 2 * (1 - F(|t|)).
double student_t_two_sided_p(double t, double dof);

/// Empirical quantile with linear interpolation between order statistics
/// (type-7 convention). `sorted` must be ascending and nonempty.
double quantile_type7(const std::vector<double>& sorted, double p);

}  // namespace ordrobust
