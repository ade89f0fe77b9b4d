#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rejlasso/solver.hpp"
#include "support.hpp"

using namespace rejlasso;

namespace {

Dataset one_positive() {
  Dataset data;
  data.x = {{0.0}};
  data.y = {1};
  return data;
}

Dictionary constant_one() { return Dictionary({Tabulated{{{0.0}}, {1.0}}}, 1.0); }

struct Instance {
  Dataset data;
  Dictionary dict;
  CostModel cm;
};

Instance random_instance(Rng& rng) {
  const std::size_t k = 3 + rng.index(10);
  const std::size_t n = 5 + rng.index(36);
  const std::size_t m = 1 + rng.index(8);
  auto data = testing_support::random_dataset(rng, n, k);
  auto dict = testing_support::random_stumps(rng, k, m);
  const double d = testing_support::uniform(rng, 0.05, 0.5);
  return {std::move(data), std::move(dict), CostModel(d, d)};
}

// Independent one-dimensional oracle: the objective is piecewise linear in lambda, so
// its minimum over a symmetric interval is attained at a breakpoint or an end point.
double brute_force_1d(const Dataset& data, const Dictionary& dict, const CostModel& cm, double r) {
  std::vector<double> cands{0.0, -10.0, 10.0};
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double g = data.y[i] * dict.value(0, data.x[i]);
    if (g == 0.0) continue;
    cands.push_back(1.0 / g);
    cands.push_back(1.0 / (cm.a() * g));
    cands.push_back(0.0);
  }
  double best = 1e300;
  for (double l : cands) {
    double obj = 2 * r * std::abs(l);
    for (std::size_t i = 0; i < data.n(); ++i) obj += phi_d(l * data.y[i] * dict.value(0, data.x[i]), cm) / data.n();
    best = std::min(best, obj);
  }
  return best;
}

}  // namespace

TEST_CASE("penalized objective") {
  const CostModel cm(0.5, 0.5);
  const auto data = one_positive();
  const auto dict = constant_one();
  CHECK(penalized_objective(data, dict, Coefficients(1), cm, 0.7) == 1.0);
  CHECK(penalized_objective(data, dict, Coefficients(std::vector<double>{1.0}), cm, 0.1) == doctest::Approx(0.2));
  const Coefficients half(std::vector<double>{0.5});
  CHECK(penalized_objective(data, dict, half, cm, 0.0) == empirical_phi_risk(data, dict, half, cm));
}

TEST_CASE("hand solved one-dimensional problems") {
  const CostModel cm(0.5, 0.5);
  const auto data = one_positive();
  const auto dict = constant_one();
  SolveConfig cfg;
  cfg.r_n = 0.1;
  auto r = solve(data, dict, cm, cfg);
  CHECK(r.converged);
  CHECK(r.lam_hat[0] == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(r.objective == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(lp_oracle(data, dict, cm, 0.1, std::nullopt).objective == doctest::Approx(0.2).epsilon(1e-9));
  cfg.r_n = 0.6;
  r = solve(data, dict, cm, cfg);
  CHECK(r.lam_hat[0] == doctest::Approx(0.0));
  CHECK(r.objective == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(lp_oracle(data, dict, cm, 0.6, std::nullopt).objective == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("config validation") {
  SolveConfig cfg;
  cfg.r_n = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.c_lambda = 2.0;
  CHECK_NOTHROW(cfg.validate());
  cfg.tol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.tol = 1e-8;
  cfg.c_lambda = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("l1 ball projection and soft threshold") {
  Eigen::VectorXd v(3);
  v << 3, -1, 0.5;
  const auto p = project_l1_ball(v, 2.0);
  CHECK(p.lpNorm<1>() == doctest::Approx(2.0));
  CHECK(p(0) == doctest::Approx(2.0));
  CHECK(p(1) == doctest::Approx(0.0));
  CHECK(project_l1_ball(v, 10.0) == v);
  const auto s = soft_threshold(v, 1.0);
  CHECK(s(0) == 2.0);
  CHECK(s(1) == 0.0);
  CHECK(s(2) == 0.0);
}

TEST_CASE("lp oracle against an independent one-dimensional search") {
  Rng rng(8);
  for (int trial = 0; trial < 40; ++trial) {
    const auto data = testing_support::random_dataset(rng, 5 + rng.index(20), 6);
    const auto dict = testing_support::random_stumps(rng, 6, 1);
    const double d = testing_support::uniform(rng, 0.05, 0.5);
    const CostModel cm(d, d);
    const double r = testing_support::uniform(rng, 0.01, 1.0);
    const double expected = brute_force_1d(data, dict, cm, r);
    CHECK(lp_oracle(data, dict, cm, r, std::nullopt).objective == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("lp oracle special cases") {
  const CostModel cm(0.3, 0.3);
  Dataset data;
  data.x = {{0.0}, {1.0}, {2.0}, {3.0}};
  data.y = {-1, -1, 1, 1};
  const Dictionary dict({SignStump{0, 1.5, 1}}, 1.0);
  SolveConfig cfg;
  cfg.r_n = 0.0;
  cfg.c_lambda = 5.0;
  CHECK(lp_oracle(data, dict, cm, 0.0, 5.0).objective == doctest::Approx(0.0));
  CHECK(solve(data, dict, cm, cfg).objective == doctest::Approx(0.0).epsilon(1e-9));
  const std::vector<std::size_t> sup{0};
  const auto lam = solve_on_support(data, dict, cm, sup, 5.0);
  CHECK(empirical_phi_risk(data, dict, lam, cm) == doctest::Approx(0.0));
  CHECK_THROWS_AS(lp_oracle(data, dict, cm, 0.1, std::nullopt, 2), std::invalid_argument);
  CHECK_THROWS_AS(solve_on_support(data, dict, cm, std::vector<std::size_t>{}, 5.0), std::invalid_argument);
  CHECK_THROWS_AS(solve_on_support(data, dict, cm, std::vector<std::size_t>{3}, 5.0), std::invalid_argument);
}

TEST_CASE("solver matches lp oracle, stays in the effective set and passes probes") {
  Rng rng(9);
  for (int trial = 0; trial < 60; ++trial) {
    const auto inst = random_instance(rng);
    const double r = testing_support::uniform(rng, 0.005, 0.5);
    std::optional<double> ball;
    if (rng.bernoulli(0.3)) ball = testing_support::uniform(rng, 0.2, 3.0);
    SolveConfig cfg;
    cfg.r_n = r;
    cfg.c_lambda = ball;
    cfg.seed = static_cast<std::uint64_t>(trial);
    const auto res = solve(inst.data, inst.dict, inst.cm, cfg);
    const auto lp = lp_oracle(inst.data, inst.dict, inst.cm, r, ball);
    CHECK(res.converged);
    CHECK(res.gap_bound >= 0.0);
    CHECK(res.gap_bound <= cfg.tol);
    CHECK(std::abs(res.objective - lp.objective) <= 1e-6);
    CHECK(l1_norm(res.lam_hat) <= 1.0 / (2 * r) + 1e-9);
    if (ball) CHECK(l1_norm(res.lam_hat) <= *ball + 1e-9);
    std::vector<Coefficients> probes{Coefficients(inst.dict.size()), res.lam_hat};
    for (int p = 0; p < 100; ++p) {
      auto lam = testing_support::random_coefficients(rng, inst.dict.size(), 1.0);
      const double radius = std::min(1.0 / (2 * r), ball.value_or(1e300));
      const double l1 = l1_norm(lam);
      if (l1 > radius)
        for (auto& v : lam.values) v *= radius / l1;
      probes.push_back(lam);
    }
    CHECK(basic_inequality_check(inst.data, inst.dict, inst.cm, r, res, probes, cfg.tol));
  }
}

TEST_CASE("optimal value and norm are monotone in the penalty") {
  Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng);
    double prev_val = -1.0;
    double prev_norm = 1e300;
    for (double r : {0.01, 0.03, 0.1, 0.3, 1.0}) {
      const auto lp = lp_oracle(inst.data, inst.dict, inst.cm, r, std::nullopt);
      CHECK(lp.objective >= prev_val - 1e-12);
      const double norm = l1_norm(lp.lam);
      CHECK(norm <= prev_norm + 1e-9);
      prev_val = lp.objective;
      prev_norm = norm;
    }
  }
}

TEST_CASE("shrinkage above the subgradient threshold") {
  Rng rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng);
    const double r = 1.01 * inst.cm.c_phi() * inst.dict.c_f() / 2;
    const auto lp = lp_oracle(inst.data, inst.dict, inst.cm, r, std::nullopt);
    CHECK(l1_norm(lp.lam) == 0.0);
    CHECK(lp.objective == doctest::Approx(1.0).epsilon(1e-12));
    SolveConfig cfg;
    cfg.r_n = r;
    CHECK(l1_norm(solve(inst.data, inst.dict, inst.cm, cfg).lam_hat) == 0.0);
  }
}

TEST_CASE("deterministic") {
  Rng rng(13);
  const auto inst = random_instance(rng);
  SolveConfig cfg;
  cfg.r_n = 0.02;
  cfg.seed = 5;
  const auto a = solve(inst.data, inst.dict, inst.cm, cfg);
  const auto b = solve(inst.data, inst.dict, inst.cm, cfg);
  CHECK(a.lam_hat == b.lam_hat);
  CHECK(a.objective == b.objective);
  CHECK(a.gap_bound == b.gap_bound);
}

TEST_CASE("dual bound is a lower bound and population design matches population risk") {
  Rng rng(14);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng);
    const auto design = empirical_design(inst.data, inst.dict);
    const double r = 0.05;
    const auto lp = lp_oracle(design, inst.cm, r, std::nullopt);
    Eigen::VectorXd y(design.rows());
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = -rng.uniform01() * inst.cm.a() * design.w(i);
    CHECK(dual_lower_bound(design, inst.cm, r, std::nullopt, y) <= lp.objective + 1e-12);
    const auto dist = testing_support::random_distribution(rng, 6);
    const auto dict = testing_support::random_stumps(rng, 6, 3);
    const auto lam = testing_support::random_coefficients(rng, 3, 1.0);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(lam.values.data(), 3);
    CHECK(design_phi_risk(population_design(dist, dict), v, inst.cm) ==
          doctest::Approx(population_phi_risk(dist, dict, lam, inst.cm)).epsilon(1e-12));
  }
}

TEST_CASE("solve on all columns matches the unpenalized limit") {
  Rng rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto inst = random_instance(rng);
    std::vector<std::size_t> all(inst.dict.size());
    for (std::size_t j = 0; j < all.size(); ++j) all[j] = j;
    const auto lam = solve_on_support(inst.data, inst.dict, inst.cm, all, 1e3);
    const auto lp = lp_oracle(inst.data, inst.dict, inst.cm, 0.0, 1e3);
    CHECK(empirical_phi_risk(inst.data, inst.dict, lam, inst.cm) == doctest::Approx(lp.objective).epsilon(1e-8));
  }
}
