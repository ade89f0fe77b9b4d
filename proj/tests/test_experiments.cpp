#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>

#include "rejlasso/experiments.hpp"
#include "rejlasso/solver.hpp"
#include "rejlasso/text_io.hpp"
#include "support.hpp"

using namespace rejlasso;

namespace {

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("rejlasso_test_" + name);
  std::filesystem::remove_all(p);
  return p;
}

ExperimentRecord sample_record(std::size_t i) {
  ExperimentRecord r;
  r.scenario = "S1";
  r.n = 400;
  r.replicate = i;
  r.seed = derive_seed(1, i);
  r.digest = "00ff00ff00ff00ff";
  r.r_n = 0.1 + i / 3.0;
  r.rhat_lb = 1.0 / 7.0;
  r.event = i % 2 == 0;
  r.lam_hat = {0.1, -2.5e-17, 1.0 / 3.0};
  r.lam_star = {0.0, 0.0, 1.0};
  r.excess_phi = 0.123456789012345678;
  r.excess_reject = 1e-300;
  r.lhs_phi = 0.5;
  r.lhs_reject = 0.25;
  r.rhs = 3.0;
  r.holds_phi = true;
  r.holds_reject = i % 3 == 0;
  r.objective = 0.75;
  r.gap_bound = 1e-10;
  r.converged = true;
  return r;
}

}  // namespace

TEST_CASE("random streams") {
  Rng a(5), b(5);
  for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
  std::set<std::uint64_t> seeds;
  for (std::uint64_t s = 0; s < 1000; ++s) seeds.insert(derive_seed(7, s));
  CHECK(seeds.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  Rng r(9);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.index(7) < 7);
  }
  CHECK_THROWS_AS(r.index(0), std::invalid_argument);
}

TEST_CASE("rn mode names") {
  CHECK(parse_rn_mode("recommended") == RnMode::recommended);
  CHECK(parse_rn_mode("cv") == RnMode::cross_validated);
  CHECK(parse_rn_mode(to_string(RnMode::fixed)) == RnMode::fixed);
  CHECK_THROWS_AS(parse_rn_mode("auto"), std::invalid_argument);
}

TEST_CASE("scenario configs") {
  for (const auto& name : scenario_names()) {
    const auto cfg = scenario_by_name(name);
    CHECK(cfg.name == name);
    CHECK_NOTHROW(cfg.validate());
    CHECK_NOTHROW(synth_distribution(cfg));
    const auto back = ScenarioConfig::from_doc(cfg.to_doc());
    CHECK(back.to_doc().to_text() == cfg.to_doc().to_text());
  }
  CHECK_THROWS_AS(scenario_by_name("S9"), std::invalid_argument);
  auto doc = scenario_by_name("S1").to_doc();
  doc.set("colour", "blue");
  CHECK_THROWS_AS(ScenarioConfig::from_doc(doc), std::invalid_argument);
  auto cfg = scenario_by_name("S1");
  cfg.replicates = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = scenario_by_name("S1");
  cfg.sample_sizes = {};
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  const auto s1 = scenario_by_name("S1");
  CHECK(s1.m == 8);
  CHECK(s1.sample_sizes == std::vector<std::size_t>{400});
  CHECK(s1.replicates == 200);
  CHECK(s1.delta == 0.05);
  CHECK(s1.rn_mode == RnMode::recommended);
}

TEST_CASE("synthetic distributions meet their margin") {
  ScenarioConfig cfg;
  cfg.eta_profile = "separated";
  cfg.eta_high = 0.95;
  cfg.d = 0.2;
  cfg.tau = 0.2;
  cfg.margin_alpha = 0.0;
  const auto sep = synth_distribution(cfg);
  const std::vector<double> below{0.01, 0.1, 0.149};
  for (double a : {1.0, 3.0})
    for (double alpha : {0.0, 1.0, 10.0}) CHECK(verify_margin_condition(sep, cfg.cost_model(), a, alpha, below).holds);

  // 101 atoms on [0, 1]: one atom sits exactly at d, so any alpha > 0 fails while
  // alpha = 0 passes with A = 2 since the mass never exceeds 1.
  cfg = ScenarioConfig{};
  cfg.eta_profile = "uniform_grid";
  cfg.support_size = 101;
  cfg.m = 101;
  cfg.margin_a = 2.0;
  cfg.margin_alpha = 1.0;
  CHECK_THROWS_AS(synth_distribution(cfg), std::invalid_argument);
  cfg.margin_alpha = 0.0;
  const auto grid101 = synth_distribution(cfg);
  double at_d = 0;
  for (std::size_t k = 0; k < grid101.size(); ++k)
    if (grid101.eta[k] == 0.2) at_d += grid101.p[k];
  CHECK(at_d == doctest::Approx(1.0 / 101));

  cfg.support_size = 6;
  cfg.m = 6;
  cfg.margin_a = 1.0;
  for (double alpha : {0.1, 1.0, 3.0}) {
    cfg.margin_alpha = alpha;
    CHECK_THROWS_AS(synth_distribution(cfg), std::invalid_argument);
  }

  cfg = ScenarioConfig{};
  cfg.eta_profile = "margin";
  for (double alpha : {0.0, 0.5, 1.0}) {
    cfg.margin_alpha = alpha;
    cfg.margin_a = 4.0;
    const auto dist = synth_distribution(cfg);
    CHECK(verify_margin_condition_exact(dist, cfg.cost_model(), 4.0, alpha).holds);
  }
}

TEST_CASE("sampling") {
  FiniteDistribution one;
  one.points = {{3.0}};
  one.p = {1.0};
  one.eta = {1.0};
  const auto d1 = sample_dataset(one, 5, 1);
  CHECK(d1.n() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(d1.x[i] == std::vector<double>{3.0});
    CHECK(d1.y[i] == 1);
  }
  FiniteDistribution two;
  two.points = {{0.0}, {1.0}};
  two.p = {0.3, 0.7};
  two.eta = {0.2, 0.6};
  const auto a = sample_dataset(two, 1000, 42);
  const auto b = sample_dataset(two, 1000, 42);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.digest() == b.digest());
  CHECK(sample_dataset(two, 1000, 43).digest() != a.digest());

  const std::size_t n = 100000;
  const auto big = sample_dataset(two, n, 7);
  double first = 0, pos_first = 0, pos_second = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (big.x[i][0] == 0.0) {
      ++first;
      pos_first += big.y[i] == 1;
    } else {
      pos_second += big.y[i] == 1;
    }
  }
  auto band = [](double count, double trials, double p) {
    return std::abs(count - trials * p) <= 3 * std::sqrt(trials * p * (1 - p));
  };
  CHECK(band(first, n, 0.3));
  CHECK(band(pos_first, first, 0.2));
  CHECK(band(pos_second, n - first, 0.6));
  CHECK_THROWS_AS(sample_dataset(two, 0, 1), std::invalid_argument);
}

TEST_CASE("cross validation") {
  const CostModel cm(0.2, 0.2);
  const auto grid = default_cv_grid(cm, 1.0);
  CHECK(grid.size() == 25);
  CHECK(grid.back() == 2 * cm.c_phi());
  CHECK(grid.front() == doctest::Approx(1e-3 * 2 * cm.c_phi()));
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);

  auto cfg = scenario_by_name("S1");
  const auto dist = synth_distribution(cfg);
  const auto dict = build_dictionary(cfg, dist);
  const auto data = sample_dataset(dist, 200, 3);
  const std::vector<double> single{0.05};
  CHECK(cross_validate_rn(data, dict, cm, single, 5, 1).r_n == 0.05);
  const auto cv = cross_validate_rn(data, dict, cm, grid, 5, 1);
  CHECK(std::find(grid.begin(), grid.end(), cv.r_n) != grid.end());
  const auto at = std::find(grid.begin(), grid.end(), cv.r_n) - grid.begin();
  CHECK(cv.cv_risk[at] <= cv.cv_risk.front());
  CHECK(cv.cv_risk[at] <= cv.cv_risk.back());
  CHECK(cross_validate_rn(data, dict, cm, grid, 5, 1).r_n == cv.r_n);
  CHECK_THROWS_AS(cross_validate_rn(data, dict, cm, grid, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate_rn(data, dict, cm, std::vector<double>{}, 5, 1), std::invalid_argument);
  CHECK_THROWS_AS(cross_validate_rn(data, dict, cm, std::vector<double>{100.0}, 5, 1), std::invalid_argument);
}

TEST_CASE("cross validation on pure noise prefers the null model") {
  auto cfg = scenario_by_name("S3");
  const auto dist = synth_distribution(cfg);
  const auto dict = build_dictionary(cfg, dist);
  const auto cm = cfg.cost_model();
  const auto grid = default_cv_grid(cm, dict.c_f());
  int null_model = 0;
  const int runs = 20;
  for (int s = 0; s < runs; ++s) {
    const auto data = sample_dataset(dist, 200, derive_seed(77, s));
    const auto cv = cross_validate_rn(data, dict, cm, grid, 5, s);
    SolveConfig sc;
    sc.r_n = cv.r_n;
    if (l1_norm(solve(data, dict, cm, sc).lam_hat) <= 1e-9) ++null_model;
  }
  CHECK(null_model >= 0.8 * runs);
}

TEST_CASE("oracle experiment is deterministic and thread independent") {
  auto cfg = scenario_by_name("S1");
  cfg.replicates = 12;
  const auto a = run_oracle_experiment(cfg, 1);
  auto b = run_oracle_experiment(cfg, 4);
  REQUIRE(a.records.size() == 12);
  for (std::size_t i = 0; i < a.records.size(); ++i) b.records[i].seconds = a.records[i].seconds;
  CHECK(a.records == b.records);
  CHECK(records_to_csv(a.records) == records_to_csv(b.records));
  CHECK(to_json(a).dump() == to_json(b).dump());
  for (const auto& r : a.records) {
    CHECK(r.error.empty());
    CHECK(r.seed == derive_seed(derive_seed(cfg.seed, r.n), r.replicate));
    CHECK(r.digest == sample_dataset(synth_distribution(cfg), r.n, r.seed).digest());
    CHECK(r.event == (r.r_n > r.rhat_lb));
  }
}

TEST_CASE("trivial scenario satisfies the oracle inequality everywhere") {
  auto cfg = scenario_by_name("S3");
  cfg.replicates = 30;
  const auto e = run_oracle_experiment(cfg);
  for (const auto& r : e.records) {
    CHECK(r.holds_phi);
    CHECK(r.holds_reject);
  }
  CHECK(e.summaries.front().frac_phi == 1.0);
}

TEST_CASE("concentration experiment") {
  auto cfg = scenario_by_name("C1");
  cfg.replicates = 99;
  CHECK_THROWS_AS(run_concentration_experiment(cfg), std::invalid_argument);
  cfg.replicates = 100;
  std::vector<double> ratio;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    cfg.seed = seed;
    cfg.sample_sizes = {200};
    const auto small = run_concentration_experiment(cfg);
    CHECK(small.in_range);
    CHECK(small.mean_ok);
    cfg.sample_sizes = {400};
    const auto large = run_concentration_experiment(cfg);
    ratio.push_back(large.tail.mean / small.tail.mean);
  }
  std::sort(ratio.begin(), ratio.end());
  CHECK(ratio[1] < 1.0);
}

TEST_CASE("records csv round trip") {
  std::vector<ExperimentRecord> recs;
  for (std::size_t i = 0; i < 5; ++i) recs.push_back(sample_record(i));
  recs[3].error = "solver failed";
  const auto text = records_to_csv(recs);
  CHECK(parse_records_csv(text) == recs);
  recs[1].seconds = 0.25;
  const auto timed = parse_records_csv(records_to_csv(recs, true));
  CHECK(timed == recs);
  CHECK_THROWS_AS(parse_records_csv("not,a,header\n"), std::invalid_argument);
}

TEST_CASE("report emission") {
  const auto dir = scratch("emit");
  CHECK_THROWS_AS(emit_report({}, nlohmann::json::object(), {}, dir.string()), std::invalid_argument);

  PlotSeries s{"rate", "n", "median_lhs", {100, 400}, {0.5, 0.25}};
  emit_report({sample_record(0)}, nlohmann::json{{"k", 1}}, {s}, dir.string());
  const auto csv = read_file((dir / "records.csv").string());
  CHECK(split(trim(csv), '\n').size() == 2);
  CHECK(std::filesystem::exists(dir / "summary.json"));
  CHECK(read_file((dir / "rate.csv").string()) == series_to_csv(s));

  auto cfg = scenario_by_name("S1");
  cfg.replicates = 6;
  const auto e = run_oracle_experiment(cfg);
  const auto d1 = scratch("emit1");
  const auto d2 = scratch("emit2");
  emit_report(e.records, to_json(e), rate_series(e), d1.string());
  emit_report(run_oracle_experiment(cfg).records, to_json(run_oracle_experiment(cfg)), rate_series(e), d2.string());
  for (const char* f : {"records.csv", "summary.json"})
    CHECK(read_file((d1 / f).string()) == read_file((d2 / f).string()));
  auto untimed = e.records;
  for (auto& r : untimed) r.seconds = 0.0;
  CHECK(parse_records_csv(read_file((d1 / "records.csv").string())) == untimed);
  for (const auto& p : {dir, d1, d2}) std::filesystem::remove_all(p);
}
