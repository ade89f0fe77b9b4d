#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "rejlasso/losses.hpp"
#include "support.hpp"

using namespace rejlasso;
using testing_support::uniform;

namespace {

// Independent piecewise form, written from the slopes.
double hinge_by_pieces(double z, double d) {
  if (z >= 1.0) return 0.0;
  if (z >= 0.0) return 1.0 - z;
  return 1.0 - (1.0 - d) / d * z;
}

}  // namespace

TEST_CASE("cost model admissible region") {
  CHECK_NOTHROW(CostModel(0.2, 0.2));
  CHECK_NOTHROW(CostModel(0.5, 0.5));
  CHECK_NOTHROW(CostModel(kMinRejectCost, 0.5));
  CHECK_THROWS_AS(CostModel(0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0.6, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0.2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(0.2, 0.81), std::invalid_argument);
  CHECK_THROWS_AS(CostModel(std::nan(""), 0.3), std::invalid_argument);
  CHECK(CostModel(0.25, 0.3).a() == doctest::Approx(3.0));
  CHECK(CostModel(0.25, 0.3).c_phi() == CostModel(0.25, 0.3).a());
}

TEST_CASE("reject loss values") {
  const CostModel cm(0.2, 0.3);
  CHECK(reject_loss(-0.5, cm) == 1.0);
  CHECK(reject_loss(0.0, cm) == 0.2);
  CHECK(reject_loss(0.3, cm) == 0.2);
  CHECK(reject_loss(-0.3, cm) == 0.2);
  CHECK(reject_loss(0.31, cm) == 0.0);
  CHECK(reject_loss(10.0, cm) == 0.0);
}

TEST_CASE("generalized hinge values") {
  const CostModel cm(0.25, 0.3);
  CHECK(phi_d(0.0, cm) == 1.0);
  CHECK(phi_d(1.0, cm) == 0.0);
  CHECK(phi_d(-1.0, cm) == 4.0);
  CHECK(phi_d(0.5, cm) == 0.5);
  CHECK(phi_d(3.0, cm) == 0.0);
}

TEST_CASE("subdifferential") {
  const CostModel cm(0.25, 0.3);
  auto s = phi_d_subdifferential(0.5, cm);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == -1.0);
  s = phi_d_subdifferential(0.0, cm);
  CHECK(s.lo == doctest::Approx(-3.0));
  CHECK(s.hi == -1.0);
  s = phi_d_subdifferential(1.0, cm);
  CHECK(s.lo == -1.0);
  CHECK(s.hi == 0.0);
  s = phi_d_subdifferential(2.0, cm);
  CHECK(s.lo == 0.0);
  CHECK(s.hi == 0.0);
  s = phi_d_subdifferential(-2.0, cm);
  CHECK(s.lo == doctest::Approx(-3.0));
  CHECK(s.hi == doctest::Approx(-3.0));
}

TEST_CASE("subgradient inequality") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto cm = testing_support::random_cost_model(rng);
    const double z = uniform(rng, -3, 3);
    const double w = uniform(rng, -3, 3);
    const auto s = phi_d_subdifferential(z, cm);
    for (double g : {s.lo, s.hi}) CHECK(phi_d(w, cm) >= phi_d(z, cm) + g * (w - z) - 1e-12);
  }
}

TEST_CASE("conditional risk") {
  const CostModel cm(0.25, 0.3);
  CHECK(conditional_phi_risk(0.0, 0.5, cm) == 1.0);
  CHECK(conditional_phi_risk(1.0, 1.0, cm) == 0.0);
  const double oracle = 0.9 * hinge_by_pieces(1.0, 0.25) + 0.1 * hinge_by_pieces(-1.0, 0.25);
  CHECK(oracle == doctest::Approx(0.4));
  CHECK(conditional_phi_risk(1.0, 0.9, cm) == doctest::Approx(oracle).epsilon(1e-14));
  CHECK_THROWS_AS(conditional_phi_risk(0.0, 1.5, cm), std::invalid_argument);
}

TEST_CASE("bayes score branches") {
  const CostModel cm(0.2, 0.3);
  CHECK(bayes_score(0.1, cm) == -1);
  CHECK(bayes_score(0.5, cm) == 0);
  CHECK(bayes_score(0.2, cm) == 0);
  CHECK(bayes_score(0.8, cm) == 0);
  CHECK(bayes_score(0.81, cm) == 1);
  CHECK_THROWS_AS(bayes_score(-0.1, cm), std::invalid_argument);
}

TEST_CASE("calibration grid minimizers") {
  const CostModel cm(0.2, 0.2);
  auto s = calibration_check(0.9, cm, 1e-3);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(1.0));
  s = calibration_check(0.5, cm, 1e-3);
  REQUIRE(s.size() == 1);
  CHECK(s[0] == doctest::Approx(0.0).epsilon(1e-12));
  s = calibration_check(0.0, cm, 1e-3);
  CHECK(s.front() == doctest::Approx(-2.0));
  CHECK(s.back() == doctest::Approx(-1.0));
  CHECK(s.size() == 1001);
  CHECK_THROWS_AS(calibration_check(0.5, cm, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(calibration_check(0.5, cm, -1.0), std::invalid_argument);
}

TEST_CASE("calibration ties at the critical values") {
  const CostModel cm(0.25, 0.3);
  const auto s = calibration_check(0.25, cm, 1e-3);
  CHECK(s.size() > 1);
  CHECK(s.front() == doctest::Approx(-1.0));
  CHECK(s.back() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("max form, dominance and value at zero") {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cm = testing_support::random_cost_model(rng);
    const double a = cm.a();
    CHECK(phi_d(0.0, cm) == 1.0);
    std::vector<double> zs;
    for (int i = 0; i <= 2000; ++i) zs.push_back(-5.0 + 10.0 * i / 2000.0);
    const double eps = 1e-9;
    for (double b : {-cm.tau() - eps, -cm.tau(), 0.0, cm.tau(), cm.tau() + eps, 1.0, -1.0}) zs.push_back(b);
    for (double z : zs) {
      CHECK(phi_d(z, cm) == std::max({0.0, 1.0 - z, 1.0 - a * z}));
      CHECK(phi_d(z, cm) >= reject_loss(z, cm));
      CHECK(phi_d(z, cm) == doctest::Approx(hinge_by_pieces(z, cm.d())).epsilon(1e-12));
    }
  }
}

TEST_CASE("convexity and Lipschitz constant") {
  Rng rng(5);
  for (int trial = 0; trial < 5000; ++trial) {
    const auto cm = testing_support::random_cost_model(rng);
    const double z1 = uniform(rng, -4, 4);
    const double z2 = uniform(rng, -4, 4);
    const double t = rng.uniform01();
    const double mid = phi_d(t * z1 + (1 - t) * z2, cm);
    CHECK(mid <= t * phi_d(z1, cm) + (1 - t) * phi_d(z2, cm) + 1e-12);
    CHECK(std::abs(phi_d(z1, cm) - phi_d(z2, cm)) <= cm.c_phi() * std::abs(z1 - z2) * (1 + 1e-12) + 1e-12);
  }
  const CostModel cm(0.1, 0.2);
  CHECK(phi_d(-2.0, cm) - phi_d(-1.0, cm) == doctest::Approx(cm.c_phi()));
}

TEST_CASE("calibration contains the Bayes score away from ties") {
  Rng rng(17);
  int checked = 0;
  while (checked < 200) {
    const double d = uniform(rng, 0.05, 0.5);
    const double eta = rng.uniform01();
    if (std::abs(eta - d) < 1e-3 || std::abs(eta - (1 - d)) < 1e-3) continue;
    const CostModel cm(d, d);
    const auto s = calibration_check(eta, cm, 1e-3);
    const double b = bayes_score(eta, cm);
    CHECK(std::any_of(s.begin(), s.end(), [&](double z) { return std::abs(z - b) < 1e-9; }));
    ++checked;
  }
}
