#include "ordrobust/mathutil.hpp"

#include <doctest.h>

#include <cmath>

using namespace ordrobust;

TEST_CASE("incomplete beta basics") {
  CHECK(incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 2.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(incomplete_beta(0.5, 0.5, 0.25) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
  CHECK(incomplete_beta(3.0, 1.0, 0.7) == doctest::Approx(0.343).epsilon(1e-12));
}

TEST_CASE("student t cdf reference points") {
  CHECK(student_t_cdf(0.0, 7.0) == doctest::Approx(0.5).epsilon(1e-14));
  // t_{0.975, 10} = 2.228138851986273
  CHECK(student_t_two_sided_p(2.228138851986273, 10.0) == doctest::Approx(0.05).epsilon(1e-10));
  // dof = 1: Cauchy, F(1) = 0.75
  CHECK(student_t_cdf(1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-10));
  // large dof approaches the normal quantile
  CHECK(student_t_two_sided_p(1.959963984540054, 1e7) == doctest::Approx(0.05).epsilon(1e-5));
  CHECK(student_t_two_sided_p(-2.228138851986273, 10.0) ==
        doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("two-sided p is monotone in |t|") {
  double prev = 1.0;
  for (double t = 0.0; t <= 6.0; t += 0.25) {
    const double p = student_t_two_sided_p(t, 23.0);
    CHECK(p <= prev + 1e-15);
    prev = p;
  }
}

TEST_CASE("type-7 quantiles interpolate order statistics") {
  const std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_type7(x, 0.0) == 1.0);
  CHECK(quantile_type7(x, 1.0) == 4.0);
  CHECK(quantile_type7(x, 0.5) == doctest::Approx(2.5));
  CHECK(quantile_type7(x, 1.0 / 3.0) == doctest::Approx(2.0));
  CHECK(quantile_type7({5.0}, 0.7) == 5.0);
}
