#include "rejlasso/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "rejlasso/solver.hpp"

namespace rejlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Eigen::VectorXd to_vec(const Coefficients& c) {
  return Eigen::Map<const Eigen::VectorXd>(c.values.data(), static_cast<Eigen::Index>(c.size()));
}

// Mass of the support with eta within distance t of c.
double mass_within(const FiniteDistribution& dist, double c, double t) {
  double s = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    if (std::abs(dist.eta[k] - c) <= t) s += dist.p[k];
  }
  return s;
}

double margin_rhs(double a_margin, double alpha, double t) {
  if (alpha == 0.0) return a_margin;
  return a_margin * std::pow(t, alpha);
}

std::vector<double> jump_points(const FiniteDistribution& dist, const CostModel& cm) {
  std::vector<double> t;
  for (double e : dist.eta) {
    t.push_back(std::abs(e - cm.d()));
    t.push_back(std::abs(e - (1.0 - cm.d())));
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

std::size_t binomial(std::size_t m, std::size_t k) {
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * double(m - k + i) / double(i);
  return static_cast<std::size_t>(std::min(r, 1e18));
}

// Advances a sorted k-subset of {0..m-1} to the next in lexicographic order.
bool next_combination(std::vector<std::size_t>& c, std::size_t m) {
  const std::size_t k = c.size();
  for (std::size_t i = k; i-- > 0;) {
    if (c[i] < m - k + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

}  // namespace

double MeasureMu::total_mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

bool MeasureMu::gram_is_psd(double tol) const {
  if (gram.size() == 0) return true;
  if ((gram - gram.transpose()).cwiseAbs().maxCoeff() > tol) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

MeasureMu measure_mu(const FiniteDistribution& dist, const Dictionary& dict) {
  dist.validate();
  MeasureMu mu;
  const auto m = static_cast<Eigen::Index>(dict.size());
  mu.weights.resize(dist.size());
  Eigen::MatrixXd vals(static_cast<Eigen::Index>(dist.size()), m);
  for (std::size_t k = 0; k < dist.size(); ++k) {
    mu.weights[k] = dist.eta[k] * (1.0 - dist.eta[k]) * dist.p[k];
    const auto v = dict.values(dist.points[k]);
    for (Eigen::Index j = 0; j < m; ++j) vals(static_cast<Eigen::Index>(k), j) = v[static_cast<std::size_t>(j)];
  }
  const Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(mu.weights.data(), vals.rows());
  const Eigen::MatrixXd prod = vals.transpose() * w.asDiagonal() * vals;
  // Exact symmetry, so correlations do not depend on the argument order.
  mu.gram = prod.triangularView<Eigen::Upper>();
  mu.gram.triangularView<Eigen::StrictlyLower>() = prod.transpose();
  return mu;
}

double mu_distance(const MeasureMu& mu, std::span<const double> a, std::span<const double> b) {
  if (a.size() != mu.weights.size() || b.size() != mu.weights.size()) {
    throw std::invalid_argument("mu_distance: length mismatch");
  }
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += mu.weights[k] * (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

CoherenceReport coherence(const MeasureMu& mu, std::span<const std::size_t> support) {
  const auto m = mu.gram.rows();
  CoherenceReport r;
  Eigen::VectorXd norms(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    norms[j] = std::sqrt(std::max(0.0, mu.gram(j, j)));
    if (!(norms[j] > 0.0)) {
      throw std::invalid_argument("dictionary element " + std::to_string(j) + " has zero norm under mu");
    }
  }
  r.c_mu = norms.minCoeff();
  r.correlations = mu.gram.array() / (norms * norms.transpose()).array();
  r.support_size = support.size();
  for (auto i : support) {
    if (static_cast<Eigen::Index>(i) >= m) throw std::invalid_argument("support index out of range");
    for (Eigen::Index j = 0; j < m; ++j) {
      if (j == static_cast<Eigen::Index>(i)) continue;
      r.rho_star = std::max(r.rho_star, std::abs(r.correlations(static_cast<Eigen::Index>(i), j)));
    }
  }
  r.condition2_holds = 12.0 * r.rho_star * double(r.support_size) <= r.c_mu;
  return r;
}

double beta_from_alpha(double alpha) {
  if (std::isinf(alpha)) return 0.5;
  return alpha / (2.0 + 2.0 * alpha);
}

double rate_exponent(double alpha) {
  if (std::isinf(alpha)) return 1.0;
  return (1.0 + alpha) / (2.0 + alpha);
}

MarginParams margin_constants(const CostModel& cm, double a_margin, double alpha, double c_lambda, double c_f) {
  if (!(a_margin >= 1.0) || std::isinf(a_margin)) throw std::invalid_argument("margin constant A must be >= 1");
  if (!(alpha >= 0.0)) throw std::invalid_argument("margin exponent alpha must be >= 0");
  if (!(c_lambda > 0.0) || !(c_f > 0.0)) throw std::invalid_argument("C_Lambda and C_F must be positive");
  MarginParams mp;
  mp.a_margin = a_margin;
  mp.alpha = alpha;
  mp.beta = beta_from_alpha(alpha);
  const double s = 1.0 + c_lambda * c_f;
  if (std::isinf(alpha)) {
    mp.c_delta_mu = std::sqrt(s * 2.0 * cm.d());
  } else {
    const double den = 2.0 + 2.0 * alpha;
    mp.c_delta_mu = std::pow(s, (1.0 + alpha) / den) * std::pow(2.0 * cm.d(), alpha / den) *
                    std::pow(4.0 * a_margin * s, 1.0 / den);
  }
  return mp;
}

MarginCheck verify_margin_condition(const FiniteDistribution& dist, const CostModel& cm, double a_margin, double alpha,
                                    std::span<const double> t_grid) {
  MarginCheck out;
  for (double t : t_grid) {
    if (!(t > 0.0)) throw std::invalid_argument("margin grid values must be positive");
    const double rhs = margin_rhs(a_margin, alpha, t);
    for (double c : {cm.d(), 1.0 - cm.d()}) {
      const double lhs = mass_within(dist, c, t);
      if (lhs > rhs) return {false, t, lhs, rhs};
    }
  }
  return out;
}

MarginCheck verify_margin_condition_exact(const FiniteDistribution& dist, const CostModel& cm, double a_margin,
                                          double alpha) {
  for (double t : jump_points(dist, cm)) {
    for (double c : {cm.d(), 1.0 - cm.d()}) {
      const double lhs = mass_within(dist, c, t);
      if (t == 0.0) {
        // The limit t -> 0+ of A t^alpha is 0 for alpha > 0.
        if (lhs > 0.0 && alpha > 0.0) return {false, 0.0, lhs, 0.0};
        if (lhs > a_margin && alpha == 0.0) return {false, 0.0, lhs, a_margin};
        continue;
      }
      const double rhs = margin_rhs(a_margin, alpha, t);
      if (lhs > rhs) return {false, t, lhs, rhs};
    }
  }
  return {};
}

double max_margin_exponent(const FiniteDistribution& dist, const CostModel& cm, double a_margin) {
  double best = kInf;
  for (double t : jump_points(dist, cm)) {
    for (double c : {cm.d(), 1.0 - cm.d()}) {
      const double lhs = mass_within(dist, c, t);
      if (lhs <= 0.0) continue;
      if (t == 0.0) return lhs <= a_margin ? 0.0 : -kInf;
      if (t >= 1.0) continue;
      if (lhs > a_margin) return -kInf;
      best = std::min(best, std::log(lhs / a_margin) / std::log(t));
    }
  }
  return best;
}

double rho_eta(double f, double f0, double eta, const CostModel& cm) {
  const double diff = std::abs(f - f0);
  if (eta < cm.d() && f < -1.0) return eta * diff;
  if (eta > 1.0 - cm.d() && f > 1.0) return (1.0 - eta) * diff;
  return diff;
}

double delta_phi(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam, const CostModel& cm) {
  const double v = population_phi_risk(dist, dict, lam, cm) - bayes_phi_risk(dist, cm);
  if (v < -kExcessTolerance) throw std::logic_error("negative excess surrogate risk");
  return std::max(v, 0.0);
}

Condition1Report condition1_check(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                                  const CostModel& cm, const MarginParams& mp, double tol) {
  Condition1Report r;
  const auto mu = measure_mu(dist, dict);
  const auto f = scores_on_support(dist, dict, lam);
  const auto f0 = bayes_scores(dist, cm);
  r.distance = mu_distance(mu, f, f0);
  r.delta_phi = delta_phi(dist, dict, lam, cm);
  r.distance_bound = mp.c_delta_mu * (mp.beta == 0.0 ? 1.0 : std::pow(r.delta_phi, mp.beta));
  r.distance_holds = r.distance <= r.distance_bound + tol;

  for (std::size_t k = 0; k < dist.size(); ++k) r.mean_rho_eta += dist.p[k] * rho_eta(f[k], f0[k], dist.eta[k], cm);
  // E rho^{(1+a)/a} / (2d {4A(1 + |lambda|_1 C_F)}^{1/a}), written as
  // (E rho / {4A(...)})^{1/a} E rho / (2d) so that a = 0 and a = inf are limits.
  const double scale = 4.0 * mp.a_margin * (1.0 + l1_norm(lam) * dict.c_f());
  const double ratio = r.mean_rho_eta / scale;
  double factor = 0.0;
  if (std::isinf(mp.alpha)) {
    factor = 1.0;
  } else if (mp.alpha > 0.0) {
    factor = std::pow(ratio, 1.0 / mp.alpha);
  } else {
    factor = ratio >= 1.0 ? kInf : 0.0;
  }
  r.delta_phi_lower = r.mean_rho_eta == 0.0 ? 0.0 : factor * r.mean_rho_eta / (2.0 * cm.d());
  r.lower_holds = r.delta_phi_lower <= r.delta_phi + tol;
  return r;
}

double complexity_term(const MarginParams& mp, double c_mu, double r_n, std::size_t l0) {
  if (!(c_mu > 0.0)) throw std::invalid_argument("c_mu must be positive");
  if (!(mp.beta >= 0.0 && mp.beta < 1.0)) throw std::invalid_argument("beta must lie in [0, 1)");
  if (l0 == 0 || r_n == 0.0) return 0.0;
  return 2.0 * std::pow(8.0 * mp.c_delta_mu / c_mu, 1.0 / (1.0 - mp.beta)) *
         std::pow(r_n * r_n * double(l0), 1.0 / (2.0 - 2.0 * mp.beta));
}

double oracle_criterion(double delta, std::size_t l0, const MarginParams& mp, double c_mu, double r_n) {
  return 3.0 * delta + complexity_term(mp, c_mu, r_n, l0);
}

double oracle_criterion(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                        const CostModel& cm, const MarginParams& mp, double c_mu, double r_n) {
  return oracle_criterion(delta_phi(dist, dict, lam, cm), l0_count(lam), mp, c_mu, r_n);
}

OracleResult oracle_search(const FiniteDistribution& dist, const Dictionary& dict, const CostModel& cm,
                           const MarginParams& mp, double r_n, std::size_t k_max, std::optional<double> c_lambda,
                           std::size_t budget) {
  if (!(r_n >= 0.0)) throw std::invalid_argument("r_n must be nonnegative");
  const std::size_t m = dict.size();
  k_max = std::min(k_max, m);
  std::size_t total = 0;
  for (std::size_t k = 0; k <= k_max; ++k) total += binomial(m, k);
  if (total > budget) {
    throw std::invalid_argument("oracle search budget exceeded: " + std::to_string(total) + " supports > " +
                                std::to_string(budget));
  }
  double radius = c_lambda ? *c_lambda : kInf;
  if (r_n > 0.0) radius = std::min(radius, 1.0 / (2.0 * r_n));
  if (!std::isfinite(radius)) throw std::invalid_argument("oracle search needs r_n > 0 or a finite C_Lambda");

  const auto mu = measure_mu(dist, dict);
  const auto coh = coherence(mu, {});
  const auto design = population_design(dist, dict);

  OracleResult best;
  best.c_mu = coh.c_mu;
  best.lam_star = Coefficients(m);
  best.delta_phi = delta_phi(dist, dict, best.lam_star, cm);
  best.criterion = oracle_criterion(best.delta_phi, 0, mp, coh.c_mu, r_n);
  best.supports_evaluated = 1;

  for (std::size_t k = 1; k <= k_max; ++k) {
    const double complexity = complexity_term(mp, coh.c_mu, r_n, k);
    std::vector<std::size_t> sup(k);
    for (std::size_t i = 0; i < k; ++i) sup[i] = i;
    do {
      ++best.supports_evaluated;
      // 3 Delta >= 0, so a support whose complexity alone loses cannot win.
      if (complexity > best.criterion) continue;
      const auto lam = solve_on_support(design, cm, sup, radius, std::numeric_limits<std::size_t>::max());
      const double dphi = delta_phi(dist, dict, lam, cm);
      const double crit = 3.0 * dphi + complexity;
      if (crit < best.criterion - 1e-12 * std::max(1.0, std::abs(best.criterion))) {
        best.criterion = crit;
        best.delta_phi = dphi;
        best.lam_star = lam;
        best.support = sup;
      }
    } while (next_combination(sup, m));
  }
  return best;
}

RhatBound rhat_lower_bound(const Dataset& data, const FiniteDistribution& dist, const Dictionary& dict,
                           const CostModel& cm, const Coefficients& lam_star, double r_n, std::size_t n_candidates,
                           std::uint64_t seed, std::optional<double> c_lambda, std::span<const Coefficients> extra) {
  if (!(r_n > 0.0)) throw std::invalid_argument("r_n must be positive");
  const auto m = static_cast<Eigen::Index>(dict.size());
  if (static_cast<Eigen::Index>(lam_star.size()) != m) throw std::invalid_argument("lambda* length mismatch");
  RhatBound out;
  out.cap = 2.0 * cm.c_phi() * dict.c_f();
  const double radius = std::min(1.0 / (2.0 * r_n), c_lambda ? *c_lambda : kInf);
  const double eps_n = 1.0 / (double(data.n()) * r_n);

  const auto emp = empirical_design(data, dict);
  const auto pop = population_design(dist, dict);
  const Eigen::VectorXd star = to_vec(lam_star);
  auto centered = [&](const Eigen::VectorXd& l) { return design_phi_risk(emp, l, cm) - design_phi_risk(pop, l, cm); };
  const double base = centered(star);
  auto offer = [&](const Eigen::VectorXd& cand) {
    const Eigen::VectorXd l = project_l1_ball(cand, radius);
    const double ratio = std::abs(centered(l) - base) / ((l - star).lpNorm<1>() + eps_n);
    out.value = std::max(out.value, ratio);
    ++out.candidates;
  };

  for (Eigen::Index j = 0; j < m; ++j) {
    for (int k = 0; k <= 12; ++k) {
      const double h = radius * std::ldexp(1.0, -k);
      for (double sgn : {1.0, -1.0}) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
        e[j] = sgn * h;
        offer(e);
        offer(star + e);
      }
    }
  }
  std::mt19937_64 rng(seed);
  for (std::size_t c = 0; c < n_candidates; ++c) {
    Eigen::VectorXd v(m);
    for (Eigen::Index j = 0; j < m; ++j) v[j] = (uniform01(rng) < 0.5 ? 0.0 : 1.0) * (2.0 * uniform01(rng) - 1.0);
    const double l1 = v.lpNorm<1>();
    if (l1 == 0.0) continue;
    const double target = radius * uniform01(rng);
    offer(v * (target / l1));
  }
  for (const auto& e : extra) offer(to_vec(e));
  return out;
}

int j_n(std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

double rhat_mean_bound(std::size_t n, std::size_t m, const CostModel& cm, double c_f) {
  if (n == 0 || m == 0) throw std::invalid_argument("n and M must be >= 1");
  const double k = cm.c_phi() * c_f;
  const double mn = double(std::max(m, n));
  return 7.0 * k / std::sqrt(double(n)) * std::sqrt(2.0 * std::log(2.0 * mn)) + j_n(n) * k / (2.0 * mn * mn);
}

TuningReport recommended_rn(std::size_t n, std::size_t m, const CostModel& cm, double c_f, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0, 1)");
  TuningReport t;
  const double k = cm.c_phi() * c_f;
  t.rhat_cap = 2.0 * k;
  t.mean_bound = rhat_mean_bound(n, m, cm, c_f);
  t.j_n = j_n(n);
  t.delta = delta;
  t.rn_recommended = t.mean_bound + k * std::sqrt(2.0 * std::log(1.0 / delta) / double(n));
  t.eps_n = 1.0 / (double(n) * t.rn_recommended);
  return t;
}

OracleSides oracle_inequality_sides(const FiniteDistribution& dist, const Dictionary& dict, const CostModel& cm,
                                    const MarginParams& mp, double c_mu, const Coefficients& lam_hat,
                                    const Coefficients& lam_star, double r_n, std::size_t n) {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  OracleSides s;
  const auto ex = excess_risks(dist, dict, lam_hat, cm);
  const double dist_l1 = r_n * l1_distance(lam_hat, lam_star);
  s.lhs_phi = ex.excess_phi + dist_l1;
  s.lhs_reject = ex.excess_reject + dist_l1;
  s.complexity = complexity_term(mp, c_mu, r_n, l0_count(lam_star));
  s.rhs = 3.0 * delta_phi(dist, dict, lam_star, cm) + s.complexity + 2.0 / double(n);
  return s;
}

TailReport concentration_tail(std::span<const double> samples, const CostModel& cm, double c_f, std::size_t n,
                              std::span<const double> t_grid) {
  if (samples.size() < 100) throw std::invalid_argument("concentration_tail needs at least 100 samples");
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  TailReport rep;
  const double count = double(samples.size());
  rep.min = *std::min_element(samples.begin(), samples.end());
  rep.max = *std::max_element(samples.begin(), samples.end());
  for (double s : samples) rep.mean += s;
  rep.mean /= count;
  const double k = cm.c_phi() * c_f;
  std::vector<double> grid(t_grid.begin(), t_grid.end());
  if (grid.empty()) {
    for (int i = 1; i <= 20; ++i) grid.push_back(i * k / (4.0 * std::sqrt(double(n))));
  }
  for (double t : grid) {
    TailPoint p;
    p.t = t;
    double hits = 0.0;
    for (double s : samples) hits += (s - rep.mean >= t) ? 1.0 : 0.0;
    p.empirical = hits / count;
    p.bound = std::exp(-double(n) * t * t / (2.0 * k * k));
    p.slack = 3.0 * std::sqrt(p.bound * (1.0 - p.bound) / count);
    p.ok = p.empirical <= p.bound + p.slack;
    rep.all_ok = rep.all_ok && p.ok;
    rep.points.push_back(p);
  }
  return rep;
}

nlohmann::json to_json(const CoherenceReport& r) {
  nlohmann::json j;
  j["c_mu"] = r.c_mu;
  j["rho_star"] = r.rho_star;
  j["support_size"] = r.support_size;
  j["condition2_holds"] = r.condition2_holds;
  auto rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < r.correlations.rows(); ++i) {
    auto row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < r.correlations.cols(); ++k) row.push_back(r.correlations(i, k));
    rows.push_back(row);
  }
  j["correlations"] = rows;
  return j;
}

nlohmann::json to_json(const MarginParams& p) {
  nlohmann::json j;
  j["a_margin"] = p.a_margin;
  j["alpha"] = std::isinf(p.alpha) ? nlohmann::json("inf") : nlohmann::json(p.alpha);
  j["beta"] = p.beta;
  j["c_delta_mu"] = p.c_delta_mu;
  return j;
}

nlohmann::json to_json(const TuningReport& t) {
  return {{"rhat_lb", t.rhat_lb}, {"rhat_cap", t.rhat_cap},     {"mean_bound", t.mean_bound}, {"j_n", t.j_n},
          {"delta", t.delta},     {"rn_recommended", t.rn_recommended}, {"eps_n", t.eps_n}};
}

nlohmann::json to_json(const TailReport& t) {
  nlohmann::json j;
  j["mean"] = t.mean;
  j["min"] = t.min;
  j["max"] = t.max;
  j["all_ok"] = t.all_ok;
  auto pts = nlohmann::json::array();
  for (const auto& p : t.points) {
    pts.push_back({{"t", p.t}, {"empirical", p.empirical}, {"bound", p.bound}, {"slack", p.slack}, {"ok", p.ok}});
  }
  j["points"] = pts;
  return j;
}

}  // namespace rejlasso
