#include "rejlasso/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <thread>

#include "rejlasso/solver.hpp"
#include "rejlasso/text_io.hpp"

namespace rejlasso {

namespace {

constexpr double kHoldTol = 1e-12;

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<std::size_t> parse_sizes(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& tok : split(s, ' ')) {
    if (tok.empty()) continue;
    const auto v = parse_int(tok);
    if (v < 1) throw ConfigError("sample sizes must be positive");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? " " : "") + std::to_string(v[i]);
  return out;
}

std::string sanitize(std::string s) {
  for (auto& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

// Equal masses; eta placed at offsets from d and 1 - d so that the distance
// distribution has the requested exponent.
FiniteDistribution margin_profile(const ScenarioConfig& cfg) {
  const std::size_t k = cfg.support_size;
  const double d = cfg.d;
  FiniteDistribution dist;
  for (std::size_t i = 0; i < k; ++i) {
    double eta = 0.0;
    const bool low = i % 2 == 0;
    if (cfg.margin_alpha == 0.0) {
      eta = low ? d : 1.0 - d;
    } else {
      // Offsets grow like (j / half)^{1 / alpha} up to (1 - 2d) / 2.
      const std::size_t half = (k + 1) / 2;
      const double j = double(i / 2 + 1);
      const double off = 0.5 * (1.0 - 2.0 * d) * std::pow(j / double(half), 1.0 / cfg.margin_alpha);
      eta = low ? d + off : 1.0 - d - off;
    }
    dist.points.push_back({double(i)});
    dist.p.push_back(1.0 / double(k));
    dist.eta.push_back(eta);
  }
  return dist;
}

std::string csv_header(bool with_timings) {
  std::string h =
      "scenario,n,replicate,seed,digest,r_n,rhat_lb,event,lam_hat,lam_star,excess_phi,excess_reject,lhs_phi,"
      "lhs_reject,rhs,holds_phi,holds_reject,objective,gap_bound,converged,error";
  if (with_timings) h += ",seconds";
  return h;
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t s = seed;
  const std::uint64_t a = splitmix64(s);
  std::uint64_t t = a ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(t);
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index needs n >= 1");
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = 0;
  do {
    v = engine_();
  } while (v >= limit);
  return static_cast<std::size_t>(v % bound);
}

std::string to_string(RnMode m) {
  switch (m) {
    case RnMode::recommended:
      return "recommended";
    case RnMode::cross_validated:
      return "cross_validated";
    case RnMode::fixed:
      return "fixed";
  }
  return "recommended";
}

RnMode parse_rn_mode(const std::string& s) {
  if (s == "recommended") return RnMode::recommended;
  if (s == "cross_validated" || s == "cv") return RnMode::cross_validated;
  if (s == "fixed") return RnMode::fixed;
  throw ConfigError("unknown rn_mode '" + s + "'");
}

void ScenarioConfig::validate() const {
  if (name.empty() || name.find_first_of(",\n") != std::string::npos) throw ConfigError("invalid scenario name");
  if (support_size < 1) throw ConfigError("support_size must be >= 1");
  if (replicates < 1) throw ConfigError("replicates must be >= 1");
  if (sample_sizes.empty()) throw ConfigError("sample_sizes must be nonempty");
  for (auto n : sample_sizes) {
    if (n < 1) throw ConfigError("sample sizes must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (!(c_lambda > 0.0)) throw ConfigError("c_lambda must be positive");
  if (!(c_f > 0.0)) throw ConfigError("c_f must be positive");
  if (rn_mode == RnMode::fixed && !(rn_fixed > 0.0)) throw ConfigError("rn_fixed must be positive");
  if (folds < 2) throw ConfigError("folds must be >= 2");
  if (!(eta_high >= 0.0 && eta_high <= 1.0)) throw ConfigError("eta_high must lie in [0, 1]");
  if (dictionary == "indicator") {
    if (m != support_size) throw ConfigError("indicator dictionary needs m == support_size");
  } else if (dictionary == "stump") {
    if (m < 1 || m > support_size) throw ConfigError("stump dictionary needs 1 <= m <= support_size");
    if (c_f != 1.0) throw ConfigError("stump dictionary has c_f = 1");
  } else {
    throw ConfigError("unknown dictionary family '" + dictionary + "'");
  }
  (void)cost_model();
}

KeyValueDoc ScenarioConfig::to_doc() const {
  KeyValueDoc doc;
  doc.set("name", name);
  doc.set("support_size", std::int64_t(support_size));
  doc.set("eta_profile", eta_profile);
  doc.set("active", std::int64_t(active));
  doc.set("eta_high", eta_high);
  doc.set("margin_a", margin_a);
  doc.set("margin_alpha", margin_alpha);
  doc.set("dictionary", dictionary);
  doc.set("m", std::int64_t(m));
  doc.set("c_f", c_f);
  doc.set("d", d);
  doc.set("tau", tau);
  doc.set("c_lambda", c_lambda);
  doc.set("sample_sizes", join_sizes(sample_sizes));
  doc.set("replicates", std::int64_t(replicates));
  doc.set("delta", delta);
  doc.set("rn_mode", to_string(rn_mode));
  doc.set("rn_fixed", rn_fixed);
  doc.set("k_max", std::int64_t(k_max));
  doc.set("folds", std::int64_t(folds));
  doc.set("rhat_candidates", std::int64_t(rhat_candidates));
  doc.set("seed", std::to_string(seed));
  return doc;
}

ScenarioConfig ScenarioConfig::from_doc(const KeyValueDoc& doc) {
  static const std::set<std::string> known{
      "name",   "support_size", "eta_profile", "active", "eta_high", "margin_a",   "margin_alpha", "dictionary",
      "m",      "c_f",          "d",           "tau",    "c_lambda", "sample_sizes", "replicates", "delta",
      "rn_mode", "rn_fixed",    "k_max",       "folds",  "rhat_candidates", "seed"};
  for (const auto& [k, v] : doc.entries()) {
    if (!known.count(k)) throw ConfigError("unknown scenario key '" + k + "'");
  }
  ScenarioConfig c;
  if (doc.has("name")) {
    const auto& name = doc.get("name");
    const auto names = scenario_names();
    if (std::find(names.begin(), names.end(), name) != names.end()) c = scenario_by_name(name);
    c.name = name;
  }
  auto size_or = [&](const char* key, std::size_t fb) {
    const auto v = doc.get_int_or(key, static_cast<std::int64_t>(fb));
    if (v < 0) throw ConfigError(std::string(key) + " must be nonnegative");
    return static_cast<std::size_t>(v);
  };
  c.support_size = size_or("support_size", c.support_size);
  c.eta_profile = doc.get_or("eta_profile", c.eta_profile);
  c.active = size_or("active", c.active);
  c.eta_high = doc.get_double_or("eta_high", c.eta_high);
  c.margin_a = doc.get_double_or("margin_a", c.margin_a);
  c.margin_alpha = doc.get_double_or("margin_alpha", c.margin_alpha);
  c.dictionary = doc.get_or("dictionary", c.dictionary);
  c.m = size_or("m", c.m);
  c.c_f = doc.get_double_or("c_f", c.c_f);
  c.d = doc.get_double_or("d", c.d);
  c.tau = doc.get_double_or("tau", c.tau);
  c.c_lambda = doc.get_double_or("c_lambda", c.c_lambda);
  if (doc.has("sample_sizes")) c.sample_sizes = parse_sizes(doc.get("sample_sizes"));
  c.replicates = size_or("replicates", c.replicates);
  c.delta = doc.get_double_or("delta", c.delta);
  if (doc.has("rn_mode")) c.rn_mode = parse_rn_mode(doc.get("rn_mode"));
  c.rn_fixed = doc.get_double_or("rn_fixed", c.rn_fixed);
  c.k_max = size_or("k_max", c.k_max);
  c.folds = size_or("folds", c.folds);
  c.rhat_candidates = size_or("rhat_candidates", c.rhat_candidates);
  c.seed = doc.get_u64_or("seed", c.seed);
  c.validate();
  return c;
}

ScenarioConfig scenario_by_name(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  if (name == "custom" || name == "S1") return c;
  if (name == "S2") {
    c.eta_profile = "separated";
    c.eta_high = 0.95;
    c.dictionary = "stump";
    c.m = 7;
    c.margin_a = 4.0;
    c.margin_alpha = 1.0;
    c.replicates = 100;
    return c;
  }
  if (name == "S3") {
    c.eta_profile = "half";
    c.margin_a = 4.0;
    c.margin_alpha = 1.0;
    c.replicates = 100;
    return c;
  }
  if (name == "S4-alpha0" || name == "S4-alpha1" || name == "S4-alphainf") {
    c.sample_sizes = {100, 400, 1600};
    c.replicates = 40;
    if (name == "S4-alpha0") {
      c.eta_profile = "margin";
      c.margin_alpha = 0.0;
    } else if (name == "S4-alpha1") {
      c.eta_profile = "margin";
      c.margin_alpha = 1.0;
      c.margin_a = 4.0;
    } else {
      // Bounded away from d and 1 - d: the largest exponent this design certifies.
      c.eta_profile = "separated";
      c.eta_high = 0.99;
      c.margin_a = 1000.0;
      c.margin_alpha = 4.0;
    }
    return c;
  }
  if (name == "C1") {
    c.sample_sizes = {200};
    c.replicates = 500;
    return c;
  }
  throw ConfigError("unknown scenario '" + name + "'");
}

std::vector<std::string> scenario_names() { return {"S1", "S2", "S3", "S4-alpha0", "S4-alpha1", "S4-alphainf", "C1"}; }

FiniteDistribution synth_distribution(const ScenarioConfig& cfg) {
  const std::size_t k = cfg.support_size;
  if (k < 1) throw std::invalid_argument("support_size must be >= 1");
  FiniteDistribution dist;
  if (cfg.eta_profile == "margin") {
    dist = margin_profile(cfg);
  } else {
    for (std::size_t i = 0; i < k; ++i) {
      double eta = 0.5;
      if (cfg.eta_profile == "sparse_realizable") {
        if (cfg.active > k) throw std::invalid_argument("active exceeds support_size");
        if (i < cfg.active) eta = i % 2 == 0 ? cfg.eta_high : 1.0 - cfg.eta_high;
      } else if (cfg.eta_profile == "separated") {
        eta = 2 * i < k ? 1.0 - cfg.eta_high : cfg.eta_high;
      } else if (cfg.eta_profile == "uniform_grid") {
        eta = k == 1 ? 0.5 : double(i) / double(k - 1);
      } else if (cfg.eta_profile != "half") {
        throw std::invalid_argument("unknown eta profile '" + cfg.eta_profile + "'");
      }
      dist.points.push_back({double(i)});
      dist.p.push_back(1.0 / double(k));
      dist.eta.push_back(eta);
    }
  }
  // Masses 1/k may not sum to 1 exactly in floating point; put the residue on the last.
  const double head = std::accumulate(dist.p.begin(), dist.p.end() - 1, 0.0);
  dist.p.back() = 1.0 - head;
  dist.validate();
  const auto check = verify_margin_condition_exact(dist, cfg.cost_model(), cfg.margin_a, cfg.margin_alpha);
  if (!check.holds) {
    throw std::invalid_argument("eta profile '" + cfg.eta_profile + "' violates the margin condition at t = " +
                                format_double(check.violating_t) + " (mass " + format_double(check.lhs) +
                                " > " + format_double(check.rhs) + ")");
  }
  return dist;
}

Dictionary build_dictionary(const ScenarioConfig& cfg, const FiniteDistribution& dist) {
  if (cfg.dictionary == "indicator") {
    if (cfg.c_f == 1.0) return indicator_dictionary(dist.points);
    std::vector<BaseFunction> fs;
    for (const auto& p : dist.points) fs.push_back(Tabulated{{p}, {cfg.c_f}});
    return Dictionary(std::move(fs), cfg.c_f);
  }
  if (cfg.dictionary == "stump") {
    std::vector<double> thresholds;
    for (std::size_t j = 0; j < cfg.m; ++j) thresholds.push_back(double(j) + 0.5);
    return stump_dictionary(0, thresholds);
  }
  throw std::invalid_argument("unknown dictionary family '" + cfg.dictionary + "'");
}

Dataset sample_dataset(const FiniteDistribution& dist, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  dist.validate();
  Rng rng(seed);
  std::vector<double> cum(dist.size());
  std::partial_sum(dist.p.begin(), dist.p.end(), cum.begin());
  Dataset data;
  data.x.reserve(n);
  data.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform01() * cum.back();
    auto k = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin());
    k = std::min(k, dist.size() - 1);
    data.x.push_back(dist.points[k]);
    data.y.push_back(rng.bernoulli(dist.eta[k]) ? 1 : -1);
  }
  return data;
}

std::vector<double> default_cv_grid(const CostModel& cm, double c_f) {
  const double hi = 2.0 * cm.c_phi() * c_f;
  const double lo = 1e-3 * hi;
  std::vector<double> g(25);
  for (int i = 0; i < 25; ++i) g[i] = lo * std::pow(hi / lo, double(i) / 24.0);
  g.back() = hi;
  return g;
}

CvResult cross_validate_rn(const Dataset& data, const Dictionary& dict, const CostModel& cm,
                           const std::vector<double>& grid, std::size_t folds, std::uint64_t seed,
                           std::optional<double> c_lambda) {
  data.validate();
  if (grid.empty()) throw std::invalid_argument("CV grid is empty");
  if (folds < 2 || folds > data.n()) throw std::invalid_argument("CV needs 2 <= folds <= n");
  const double cap = 2.0 * cm.c_phi() * dict.c_f();
  for (double r : grid) {
    if (!(r > 0.0 && r <= cap)) throw std::invalid_argument("CV grid must lie in (0, 2 C_phi C_F]");
  }
  std::vector<std::size_t> perm(data.n());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.index(i)]);

  std::vector<Dataset> train(folds), test(folds);
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<std::size_t> tr, te;
    for (std::size_t i = 0; i < perm.size(); ++i) (i % folds == f ? te : tr).push_back(perm[i]);
    train[f] = data.subset(tr);
    test[f] = data.subset(te);
  }

  CvResult res;
  res.grid = grid;
  res.cv_risk.assign(grid.size(), 0.0);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    SolveConfig sc;
    sc.r_n = grid[g];
    sc.c_lambda = c_lambda;
    for (std::size_t f = 0; f < folds; ++f) {
      const auto fit = solve(train[f], dict, cm, sc);
      res.cv_risk[g] += empirical_reject_risk(test[f], dict, fit.lam_hat, cm) / double(folds);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double a = res.cv_risk[g], b = res.cv_risk[best];
    if (a < b - 1e-12 || (std::abs(a - b) <= 1e-12 && grid[g] > grid[best])) best = g;
  }
  res.r_n = grid[best];
  return res;
}

ExperimentSummary summarize(const std::vector<ExperimentRecord>& records, std::size_t n) {
  ExperimentSummary s;
  s.n = n;
  std::size_t ev = 0, phi = 0, rej = 0, phi_ev = 0, rej_ev = 0;
  std::vector<double> lp, lr;
  for (const auto& r : records) {
    if (r.n != n) continue;
    ++s.replicates;
    s.r_n = r.r_n;
    if (!r.error.empty()) {
      ++s.failed;
      continue;
    }
    ev += r.event;
    phi += r.holds_phi;
    rej += r.holds_reject;
    phi_ev += r.event && r.holds_phi;
    rej_ev += r.event && r.holds_reject;
    lp.push_back(r.lhs_phi);
    lr.push_back(r.lhs_reject);
    s.max_rhat_lb = std::max(s.max_rhat_lb, r.rhat_lb);
    s.lam_star = r.lam_star;
  }
  if (s.replicates > 0) {
    const double tot = double(s.replicates);
    s.frac_event = double(ev) / tot;
    s.frac_phi = double(phi) / tot;
    s.frac_reject = double(rej) / tot;
  }
  if (ev > 0) {
    s.frac_phi_given_event = double(phi_ev) / double(ev);
    s.frac_reject_given_event = double(rej_ev) / double(ev);
  }
  s.median_lhs_phi = median(lp);
  s.median_lhs_reject = median(lr);
  return s;
}

OracleExperiment run_oracle_experiment(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  OracleExperiment out;
  out.config = cfg;
  const auto cm = cfg.cost_model();
  const auto dist = synth_distribution(cfg);
  const auto dict = build_dictionary(cfg, dist);
  out.margin = margin_constants(cm, cfg.margin_a, cfg.margin_alpha, cfg.c_lambda, dict.c_f());
  const auto mu = measure_mu(dist, dict);
  const auto grid = default_cv_grid(cm, dict.c_f());

  for (std::size_t n : cfg.sample_sizes) {
    const std::uint64_t n_seed = derive_seed(cfg.seed, n);
    const auto tuning = recommended_rn(n, dict.size(), cm, dict.c_f(), cfg.delta);
    std::vector<ExperimentRecord> recs(cfg.replicates);
    std::vector<Dataset> data(cfg.replicates);
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      recs[r].scenario = cfg.name;
      recs[r].n = n;
      recs[r].replicate = r;
      recs[r].seed = derive_seed(n_seed, r);
      data[r] = sample_dataset(dist, n, recs[r].seed);
      recs[r].digest = data[r].digest();
    }

    std::vector<double> rn(cfg.replicates, cfg.rn_mode == RnMode::fixed ? cfg.rn_fixed : tuning.rn_recommended);
    if (cfg.rn_mode == RnMode::cross_validated) {
      parallel_for(cfg.replicates, threads, [&](std::size_t r) {
        try {
          rn[r] = cross_validate_rn(data[r], dict, cm, grid, cfg.folds, derive_seed(recs[r].seed, 2), cfg.c_lambda).r_n;
        } catch (const std::exception& e) {
          recs[r].error = sanitize(e.what());
        }
      });
    }

    // lambda* is a population object: one search per distinct r_n.
    std::map<double, OracleResult> oracles;
    for (std::size_t r = 0; r < cfg.replicates; ++r) {
      if (!recs[r].error.empty() || oracles.count(rn[r])) continue;
      oracles.emplace(rn[r], oracle_search(dist, dict, cm, out.margin, rn[r], cfg.k_max, cfg.c_lambda));
    }

    parallel_for(cfg.replicates, threads, [&](std::size_t r) {
      auto& rec = recs[r];
      rec.r_n = rn[r];
      if (!rec.error.empty()) return;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const auto& orc = oracles.at(rn[r]);
        SolveConfig sc;
        sc.r_n = rn[r];
        sc.c_lambda = cfg.c_lambda;
        sc.seed = rec.seed;
        const auto fit = solve(data[r], dict, cm, sc);
        std::vector<Coefficients> extra = fit.snapshots;
        extra.push_back(fit.lam_hat);
        const auto rb = rhat_lower_bound(data[r], dist, dict, cm, orc.lam_star, rn[r], cfg.rhat_candidates,
                                         derive_seed(rec.seed, 1), cfg.c_lambda, extra);
        const auto sides = oracle_inequality_sides(dist, dict, cm, out.margin, orc.c_mu, fit.lam_hat, orc.lam_star,
                                                   rn[r], n);
        const auto ex = excess_risks(dist, dict, fit.lam_hat, cm);
        rec.rhat_lb = rb.value;
        rec.event = rn[r] > rb.value;
        rec.lam_hat = fit.lam_hat.values;
        rec.lam_star = orc.lam_star.values;
        rec.excess_phi = ex.excess_phi;
        rec.excess_reject = ex.excess_reject;
        rec.lhs_phi = sides.lhs_phi;
        rec.lhs_reject = sides.lhs_reject;
        rec.rhs = sides.rhs;
        rec.holds_phi = sides.lhs_phi <= sides.rhs + kHoldTol;
        rec.holds_reject = sides.lhs_reject <= sides.rhs + kHoldTol;
        rec.objective = fit.objective;
        rec.gap_bound = fit.gap_bound;
        rec.converged = fit.converged;
      } catch (const std::exception& e) {
        rec.error = sanitize(e.what());
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    });

    auto s = summarize(recs, n);
    s.tuning = tuning;
    s.tuning.rhat_lb = s.max_rhat_lb;
    if (!oracles.empty()) {
      const auto& orc = oracles.begin()->second;
      s.support = orc.support;
      s.criterion = orc.criterion;
      s.coherence = coherence(mu, orc.support);
    }
    out.summaries.push_back(std::move(s));
    out.records.insert(out.records.end(), recs.begin(), recs.end());
  }
  return out;
}

ConcentrationResult run_concentration_experiment(const ScenarioConfig& cfg, unsigned threads) {
  cfg.validate();
  if (cfg.replicates < 100) throw std::invalid_argument("concentration experiment needs >= 100 replicates");
  const auto cm = cfg.cost_model();
  const auto dist = synth_distribution(cfg);
  const auto dict = build_dictionary(cfg, dist);
  const auto mp = margin_constants(cm, cfg.margin_a, cfg.margin_alpha, cfg.c_lambda, dict.c_f());
  ConcentrationResult res;
  res.n = cfg.sample_sizes.front();
  const auto tuning = recommended_rn(res.n, dict.size(), cm, dict.c_f(), cfg.delta);
  res.r_n = cfg.rn_mode == RnMode::fixed ? cfg.rn_fixed : tuning.rn_recommended;
  res.mean_bound = tuning.mean_bound;
  res.cap = tuning.rhat_cap;
  const auto orc = oracle_search(dist, dict, cm, mp, res.r_n, cfg.k_max, cfg.c_lambda);
  const std::uint64_t n_seed = derive_seed(cfg.seed, res.n);

  res.samples.assign(cfg.replicates, 0.0);
  parallel_for(cfg.replicates, threads, [&](std::size_t r) {
    const auto seed = derive_seed(n_seed, r);
    const auto data = sample_dataset(dist, res.n, seed);
    SolveConfig sc;
    sc.r_n = res.r_n;
    sc.c_lambda = cfg.c_lambda;
    const auto fit = solve(data, dict, cm, sc);
    std::vector<Coefficients> extra = fit.snapshots;
    extra.push_back(fit.lam_hat);
    res.samples[r] = rhat_lower_bound(data, dist, dict, cm, orc.lam_star, res.r_n, cfg.rhat_candidates,
                                      derive_seed(seed, 1), cfg.c_lambda, extra)
                         .value;
  });
  for (double s : res.samples) res.in_range = res.in_range && s >= 0.0 && s <= res.cap;
  res.tail = concentration_tail(res.samples, cm, dict.c_f(), res.n);
  res.mean_ok = res.tail.mean <= res.mean_bound;
  return res;
}

nlohmann::json to_json(const ExperimentSummary& s) {
  nlohmann::json j;
  j["n"] = s.n;
  j["replicates"] = s.replicates;
  j["failed"] = s.failed;
  j["r_n"] = s.r_n;
  j["frac_event"] = s.frac_event;
  j["frac_phi"] = s.frac_phi;
  j["frac_reject"] = s.frac_reject;
  j["frac_phi_given_event"] = s.frac_phi_given_event;
  j["frac_reject_given_event"] = s.frac_reject_given_event;
  j["median_lhs_phi"] = s.median_lhs_phi;
  j["median_lhs_reject"] = s.median_lhs_reject;
  j["max_rhat_lb"] = s.max_rhat_lb;
  j["lam_star"] = s.lam_star;
  j["support"] = s.support;
  j["criterion"] = s.criterion;
  j["coherence"] = to_json(s.coherence);
  j["tuning"] = to_json(s.tuning);
  return j;
}

nlohmann::json to_json(const OracleExperiment& e) {
  nlohmann::json j;
  nlohmann::json cfg;
  const auto doc = e.config.to_doc();
  for (const auto& [k, v] : doc.entries()) cfg[k] = v;
  j["config"] = cfg;
  j["margin"] = to_json(e.margin);
  auto arr = nlohmann::json::array();
  for (const auto& s : e.summaries) arr.push_back(to_json(s));
  j["summaries"] = arr;
  return j;
}

nlohmann::json to_json(const ConcentrationResult& c) {
  nlohmann::json j;
  j["n"] = c.n;
  j["r_n"] = c.r_n;
  j["replicates"] = c.samples.size();
  j["mean_bound"] = c.mean_bound;
  j["cap"] = c.cap;
  j["in_range"] = c.in_range;
  j["mean_ok"] = c.mean_ok;
  j["tail"] = to_json(c.tail);
  return j;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records, bool with_timings) {
  std::string out = csv_header(with_timings) + '\n';
  for (const auto& r : records) {
    out += r.scenario + ',' + std::to_string(r.n) + ',' + std::to_string(r.replicate) + ',' + std::to_string(r.seed) +
           ',' + r.digest + ',' + format_double(r.r_n) + ',' + format_double(r.rhat_lb) + ',' + (r.event ? "1" : "0") +
           ',' + join_doubles(r.lam_hat) + ',' + join_doubles(r.lam_star) + ',' + format_double(r.excess_phi) + ',' +
           format_double(r.excess_reject) + ',' + format_double(r.lhs_phi) + ',' + format_double(r.lhs_reject) + ',' +
           format_double(r.rhs) + ',' + (r.holds_phi ? "1" : "0") + ',' + (r.holds_reject ? "1" : "0") + ',' +
           format_double(r.objective) + ',' + format_double(r.gap_bound) + ',' + (r.converged ? "1" : "0") + ',' +
           sanitize(r.error);
    if (with_timings) out += ',' + format_double(r.seconds);
    out += '\n';
  }
  return out;
}

std::vector<ExperimentRecord> parse_records_csv(std::string_view text) {
  std::vector<ExperimentRecord> out;
  bool header = true;
  bool timings = false;
  std::size_t line_no = 0;
  for (const auto& raw : split(text, '\n')) {
    ++line_no;
    if (raw.empty()) continue;
    if (header) {
      if (raw == csv_header(true)) {
        timings = true;
      } else if (raw != csv_header(false)) {
        throw std::invalid_argument("records: unexpected header");
      }
      header = false;
      continue;
    }
    const auto f = split(raw, ',');
    if (f.size() != (timings ? 22u : 21u)) {
      throw std::invalid_argument("records line " + std::to_string(line_no) + ": wrong field count");
    }
    auto flag = [&](const std::string& s) {
      if (s != "0" && s != "1") throw std::invalid_argument("records line " + std::to_string(line_no) + ": bad flag");
      return s == "1";
    };
    ExperimentRecord r;
    r.scenario = f[0];
    r.n = parse_u64(f[1]);
    r.replicate = parse_u64(f[2]);
    r.seed = parse_u64(f[3]);
    r.digest = f[4];
    r.r_n = parse_double(f[5]);
    r.rhat_lb = parse_double(f[6]);
    r.event = flag(f[7]);
    r.lam_hat = parse_doubles(f[8]);
    r.lam_star = parse_doubles(f[9]);
    r.excess_phi = parse_double(f[10]);
    r.excess_reject = parse_double(f[11]);
    r.lhs_phi = parse_double(f[12]);
    r.lhs_reject = parse_double(f[13]);
    r.rhs = parse_double(f[14]);
    r.holds_phi = flag(f[15]);
    r.holds_reject = flag(f[16]);
    r.objective = parse_double(f[17]);
    r.gap_bound = parse_double(f[18]);
    r.converged = flag(f[19]);
    r.error = f[20];
    if (timings) r.seconds = parse_double(f[21]);
    out.push_back(std::move(r));
  }
  if (header) throw std::invalid_argument("records: missing header");
  return out;
}

std::string series_to_csv(const PlotSeries& s) {
  if (s.x.size() != s.y.size()) throw std::invalid_argument("series x/y length mismatch");
  std::string out = s.x_label + ',' + s.y_label + '\n';
  for (std::size_t i = 0; i < s.x.size(); ++i) out += format_double(s.x[i]) + ',' + format_double(s.y[i]) + '\n';
  return out;
}

std::vector<PlotSeries> rate_series(const OracleExperiment& e) {
  PlotSeries lhs{e.config.name + "_rate_lhs", "n", "median_lhs_phi", {}, {}};
  PlotSeries rn{e.config.name + "_rate_rn", "n", "r_n", {}, {}};
  for (const auto& s : e.summaries) {
    lhs.x.push_back(double(s.n));
    lhs.y.push_back(s.median_lhs_phi);
    rn.x.push_back(double(s.n));
    rn.y.push_back(s.r_n);
  }
  return {lhs, rn};
}

std::vector<PlotSeries> tail_series(const ConcentrationResult& c) {
  PlotSeries emp{"tail_empirical", "t", "empirical", {}, {}};
  PlotSeries bound{"tail_bound", "t", "bound", {}, {}};
  for (const auto& p : c.tail.points) {
    emp.x.push_back(p.t);
    emp.y.push_back(p.empirical);
    bound.x.push_back(p.t);
    bound.y.push_back(p.bound);
  }
  return {emp, bound};
}

void emit_report(const std::vector<ExperimentRecord>& records, const nlohmann::json& summary,
                 const std::vector<PlotSeries>& series, const std::string& out_dir, bool with_timings) {
  if (records.empty()) throw std::invalid_argument("emit_report: no records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + out_dir + "': " + ec.message());
  const std::filesystem::path dir(out_dir);
  write_file((dir / "records.csv").string(), records_to_csv(records, with_timings));
  write_file((dir / "summary.json").string(), summary.dump(2) + '\n');
  for (const auto& s : series) write_file((dir / (s.name + ".csv")).string(), series_to_csv(s));
}

}  // namespace rejlasso
