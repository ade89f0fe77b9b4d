#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>

#include "rejlasso/simplex.hpp"
#include "support.hpp"

using namespace rejlasso;

TEST_CASE("textbook problem") {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18
  Eigen::MatrixXd A(3, 2);
  A << 1, 0, 0, 2, 3, 2;
  Eigen::VectorXd b(3);
  b << 4, 12, 18;
  Eigen::VectorXd c(2);
  c << 3, 5;
  const auto r = simplex_max(A, b, c);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(36.0));
  CHECK(r.x(0) == doctest::Approx(2.0));
  CHECK(r.x(1) == doctest::Approx(6.0));
  CHECK(b.dot(r.dual) == doctest::Approx(36.0));
}

TEST_CASE("unbounded") {
  Eigen::MatrixXd A(1, 2);
  A << 1, -1;
  Eigen::VectorXd b(1);
  b << 1;
  Eigen::VectorXd c(2);
  c << 0, 1;
  CHECK(simplex_max(A, b, c).status == LpStatus::unbounded);
}

TEST_CASE("degenerate problem terminates") {
  // Beale's cycling example for Dantzig pricing.
  Eigen::MatrixXd A(3, 4);
  A << 0.25, -8, -1, 9, 0.5, -12, -0.5, 3, 0, 0, 1, 0;
  Eigen::VectorXd b(3);
  b << 0, 0, 1;
  Eigen::VectorXd c(4);
  c << 0.75, -20, 0.5, -6;
  const auto r = simplex_max(A, b, c);
  REQUIRE(r.status == LpStatus::optimal);
  CHECK(r.value == doctest::Approx(1.25));
}

TEST_CASE("strong duality on random feasible programs") {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const int m = 1 + static_cast<int>(rng.index(8));
    const int n = 1 + static_cast<int>(rng.index(8));
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = testing_support::uniform(rng, -1, 2);
    // A nonnegative row keeps the program bounded.
    for (int j = 0; j < n; ++j) A(0, j) = 0.1 + rng.uniform01();
    Eigen::VectorXd b(m), c(n);
    for (int i = 0; i < m; ++i) b(i) = rng.uniform01() * 3;
    for (int j = 0; j < n; ++j) c(j) = testing_support::uniform(rng, -1, 1);
    const auto r = simplex_max(A, b, c);
    REQUIRE(r.status == LpStatus::optimal);
    CHECK(((A * r.x).array() <= b.array() + 1e-9).all());
    CHECK((r.x.array() >= -1e-12).all());
    CHECK((r.dual.array() >= -1e-12).all());
    CHECK(((A.transpose() * r.dual).array() >= c.array() - 1e-9).all());
    CHECK(c.dot(r.x) == doctest::Approx(r.value).epsilon(1e-9));
    CHECK(b.dot(r.dual) == doctest::Approx(r.value).epsilon(1e-9));
  }
}
