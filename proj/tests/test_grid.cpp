#include "ordrobust/grid.hpp"

#include <doctest.h>

using namespace ordrobust;

TEST_CASE("lattice counts follow stars and bars") {
  CHECK(simplex_grid_size(3, 2) == 1);
  CHECK(simplex_grid_size(3, 100) == 99);
  CHECK(simplex_grid_size(4, 10) == 36);   // C(9,2)
  CHECK(simplex_grid_size(5, 12) == 165);  // C(11,3)

  for (const int k : {3, 4, 5}) {
    for (const int r : {6, 9, 14}) {
      std::uint64_t seen = 0;
      enumerate_simplex_grid(k, 1.0, r, [&](const Vec&) { ++seen; });
      CHECK(seen == simplex_grid_size(k, r));
    }
  }
}

TEST_CASE("every lattice point is feasible and sums to the range") {
  enumerate_simplex_grid(4, 7.0, 9, [&](const Vec& w) {
    CHECK(w.sum() == doctest::Approx(7.0).epsilon(1e-12));
    CHECK(w.minCoeff() >= 7.0 / 9 - 1e-12);
  });
}

TEST_CASE("combinatorial guard rejects large K") {
  CHECK_THROWS_AS(enumerate_simplex_grid(7, 1.0, 10, [](const Vec&) {}), ValidationError);
}

TEST_CASE("oracle keeps the lexicographically first tie") {
  // Constant objective: the first enumerated point wins.
  GridBest best = grid_oracle(3, 2.0, 4, [](const Vec&) { return 1.0; }, false);
  CHECK(best.w(0) == doctest::Approx(0.5));
  CHECK(best.evaluated == simplex_grid_size(3, 4));
}
