#include "rejlasso/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "rejlasso/simplex.hpp"

namespace rejlasso {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Coefficients to_coef(const Eigen::VectorXd& v) { return Coefficients(std::vector<double>(v.data(), v.data() + v.size())); }

bool has_ball(std::optional<double> c) { return c.has_value() && std::isfinite(*c); }

double risk_from_margins(const MarginDesign& design, const Eigen::VectorXd& z, const CostModel& cm) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) s += design.w[i] * phi_d(z[i], cm);
  return s;
}

double objective_from_margins(const MarginDesign& design, const Eigen::VectorXd& lam, const Eigen::VectorXd& z,
                              const CostModel& cm, double r_n) {
  return risk_from_margins(design, z, cm) + 2.0 * r_n * lam.lpNorm<1>();
}

// Largest t >= 0 with |lam + t d|_1 <= radius.
double ball_step_limit(const Eigen::VectorXd& lam, const Eigen::VectorXd& d, double radius) {
  struct Kink {
    double t;
    double inc;
  };
  std::vector<Kink> kinks;
  double b = lam.lpNorm<1>();
  double slope = 0.0;
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    if (d[j] == 0.0) continue;
    if (lam[j] == 0.0) {
      slope += std::abs(d[j]);
      continue;
    }
    slope += (lam[j] > 0.0 ? d[j] : -d[j]);
    const double t = -lam[j] / d[j];
    if (t > 0.0) kinks.push_back({t, 2.0 * std::abs(d[j])});
  }
  std::sort(kinks.begin(), kinks.end(), [](const Kink& x, const Kink& y) { return x.t < y.t; });
  double t_cur = 0.0;
  for (const auto& k : kinks) {
    if (slope > 0.0 && b + slope * (k.t - t_cur) > radius) break;
    b += slope * (k.t - t_cur);
    t_cur = k.t;
    slope += k.inc;
  }
  if (slope <= 0.0) return kInf;
  return std::max(0.0, t_cur + (radius - b) / slope);
}

// Exact minimizer over t of  sum_i w_i phi(z_i + t gd_i) + 2r |lam + t d|_1,  restricted
// to the ball when present. The function is convex piecewise linear in t, so the
// minimizer sits where the slope first becomes nonnegative.
double exact_line_search(const MarginDesign& design, const CostModel& cm, double r_n, std::optional<double> c_lambda,
                         const Eigen::VectorXd& lam, const Eigen::VectorXd& z, const Eigen::VectorXd& d,
                         const Eigen::VectorXd& gd) {
  struct Kink {
    double t;
    double inc;
  };
  const double a = cm.a();
  std::vector<Kink> kinks;
  kinks.reserve(static_cast<std::size_t>(2 * gd.size() + d.size()));
  double slope = 0.0;
  for (Eigen::Index i = 0; i < gd.size(); ++i) {
    const double g = gd[i];
    if (g == 0.0) continue;
    const double wg = design.w[i] * std::abs(g);
    if (g > 0.0) slope -= a * wg;
    kinks.push_back({-z[i] / g, wg * (a - 1.0)});
    kinks.push_back({(1.0 - z[i]) / g, wg});
  }
  for (Eigen::Index j = 0; j < d.size(); ++j) {
    if (d[j] == 0.0) continue;
    slope -= 2.0 * r_n * std::abs(d[j]);
    kinks.push_back({-lam[j] / d[j], 4.0 * r_n * std::abs(d[j])});
  }
  std::sort(kinks.begin(), kinks.end(), [](const Kink& x, const Kink& y) { return x.t < y.t; });

  double t_star = -kInf;
  if (slope < 0.0) {
    t_star = kInf;
    for (const auto& k : kinks) {
      slope += k.inc;
      if (slope >= 0.0) {
        t_star = k.t;
        break;
      }
    }
  }
  double hi = kInf;
  double lo = -kInf;
  if (has_ball(c_lambda)) {
    hi = ball_step_limit(lam, d, *c_lambda);
    lo = -ball_step_limit(lam, -d, *c_lambda);
  }
  if (std::isinf(t_star)) {
    t_star = t_star > 0 ? hi : lo;
    if (std::isinf(t_star)) return 0.0;
  }
  return std::clamp(t_star, lo, hi);
}

// prox of sigma * max(y, -w) restricted to [-a w, 0].
double prox_dual_row(double v, double sigma, double w, double a) {
  const double y1 = std::clamp(v - sigma, -w, 0.0);
  const double y2 = std::clamp(v, -a * w, -w);
  auto val = [&](double y) { return (y - v) * (y - v) / (2.0 * sigma) + std::max(y, -w); };
  return val(y1) <= val(y2) ? y1 : y2;
}

Eigen::VectorXd prox_primal(const Eigen::VectorXd& v, double step, double r_n, std::optional<double> c_lambda) {
  Eigen::VectorXd x = soft_threshold(v, 2.0 * r_n * step);
  if (has_ball(c_lambda)) x = project_l1_ball(x, *c_lambda);
  return x;
}

double spectral_norm(const Eigen::MatrixXd& g) {
  if (g.size() == 0) return 0.0;
  Eigen::MatrixXd gram = g.transpose() * g;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

class PenalizedSolver {
 public:
  PenalizedSolver(const MarginDesign& design, const CostModel& cm, const SolveConfig& cfg)
      : design_(design), cm_(cm), cfg_(cfg) {}

  SolveResult run() {
    SolveResult res;
    const auto m = design_.cols();
    best_x_ = Eigen::VectorXd::Zero(m);
    best_p_ = objective(best_x_);
    best_d_ = dual_lower_bound(design_, cm_, cfg_.r_n, cfg_.c_lambda, -design_.w);
    const double gnorm = spectral_norm(design_.g);
    if (gnorm > 0.0) {
      warm_start();
      primal_dual(gnorm, res);
    }
    polish(res);
    finish(res);
    return res;
  }

 private:
  double objective(const Eigen::VectorXd& x) const { return design_objective(design_, x, cm_, cfg_.r_n); }

  double gap() const { return best_p_ - best_d_; }

  void offer_primal(const Eigen::VectorXd& x) {
    const double p = objective(x);
    if (p < best_p_) {
      best_p_ = p;
      best_x_ = x;
    }
  }

  void offer_dual(const Eigen::VectorXd& y) {
    best_d_ = std::max(best_d_, dual_lower_bound(design_, cm_, cfg_.r_n, cfg_.c_lambda, y));
  }

  void warm_start() {
    const auto m = design_.cols();
    const double a = cm_.a();
    const double radius =
        std::min(has_ball(cfg_.c_lambda) ? *cfg_.c_lambda : kInf, cfg_.r_n > 0.0 ? 1.0 / (2.0 * cfg_.r_n) : kInf);
    const double lip = a * design_.g.cwiseAbs().rowwise().maxCoeff().maxCoeff() + 2.0 * cfg_.r_n * std::sqrt(double(m));
    if (!(lip > 0.0) || !std::isfinite(radius)) return;
    const std::size_t iters = std::min<std::size_t>(200, cfg_.max_iter / 10);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
    for (std::size_t k = 0; k < iters; ++k) {
      const Eigen::VectorXd z = design_.g * x;
      Eigen::VectorXd s(z.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) s[i] = design_.w[i] * phi_d_subdifferential(z[i], cm_).hi;
      const double step = radius / (lip * std::sqrt(double(k + 1)));
      x = prox_primal(x - step * (design_.g.transpose() * s), step, cfg_.r_n, cfg_.c_lambda);
      offer_primal(x);
    }
  }

  // Restarted PDHG on  min_x g(x) + f(Gx)  with f = sum_i w_i phi_d and g the penalty
  // plus optional ball indicator.
  void primal_dual(double gnorm, SolveResult& res) {
    const double a = cm_.a();
    const auto n = design_.rows();
    const double eta = 0.9 / gnorm;
    const double tol = cfg_.tol;

    Eigen::VectorXd x = best_x_;
    Eigen::VectorXd y(n);
    {
      const Eigen::VectorXd z = design_.g * x;
      for (Eigen::Index i = 0; i < n; ++i) y[i] = design_.w[i] * phi_d_subdifferential(z[i], cm_).hi;
    }
    offer_dual(y);
    double omega = std::max(y.norm(), 1e-12) / std::max(x.norm(), 1.0);

    Eigen::VectorXd x_sum = Eigen::VectorXd::Zero(x.size());
    Eigen::VectorXd y_sum = Eigen::VectorXd::Zero(n);
    std::size_t since_restart = 0;
    Eigen::VectorXd x_last = x;
    Eigen::VectorXd y_last = y;
    double gap_at_restart = kInf;
    double prev_candidate_gap = kInf;
    constexpr std::size_t kCheckEvery = 64;

    std::size_t it = 0;
    for (; it < cfg_.max_iter; ++it) {
      const double tau = eta / omega;
      const double sigma = eta * omega;
      const Eigen::VectorXd x_new = prox_primal(x - tau * (design_.g.transpose() * y), tau, cfg_.r_n, cfg_.c_lambda);
      const Eigen::VectorXd v = y + sigma * (design_.g * (2.0 * x_new - x));
      for (Eigen::Index i = 0; i < n; ++i) y[i] = prox_dual_row(v[i], sigma, design_.w[i], a);
      x = x_new;
      x_sum += x;
      y_sum += y;
      ++since_restart;

      if ((it + 1) % kCheckEvery != 0) continue;

      const Eigen::VectorXd x_avg = x_sum / double(since_restart);
      const Eigen::VectorXd y_avg = y_sum / double(since_restart);
      const double p_cur = objective(x), p_avg = objective(x_avg);
      const double d_cur = dual_lower_bound(design_, cm_, cfg_.r_n, cfg_.c_lambda, y);
      const double d_avg = dual_lower_bound(design_, cm_, cfg_.r_n, cfg_.c_lambda, y_avg);
      offer_primal(x);
      offer_primal(x_avg);
      best_d_ = std::max({best_d_, d_cur, d_avg});
      if (cfg_.trace) *cfg_.trace << (it + 1) << ' ' << best_p_ << ' ' << gap() << '\n';
      if (gap() <= 0.1 * tol) {
        ++it;
        break;
      }

      const bool use_avg = (p_avg - d_avg) < (p_cur - d_cur);
      const double cand_gap = use_avg ? p_avg - d_avg : p_cur - d_cur;
      const bool restart = cand_gap <= 0.2 * gap_at_restart ||
                           (cand_gap <= 0.8 * gap_at_restart && cand_gap > prev_candidate_gap) ||
                           double(since_restart) >= 0.36 * double(it + 1);
      prev_candidate_gap = cand_gap;
      if (!restart) continue;

      if (use_avg) {
        x = x_avg;
        y = y_avg;
      }
      const double dx = (x - x_last).norm();
      const double dy = (y - y_last).norm();
      if (dx > 1e-10 && dy > 1e-10) omega = std::exp(0.5 * std::log(dy / dx) + 0.5 * std::log(omega));
      x_last = x;
      y_last = y;
      gap_at_restart = cand_gap;
      prev_candidate_gap = kInf;
      x_sum.setZero();
      y_sum.setZero();
      since_restart = 0;
      if (res.snapshots.size() < 32) res.snapshots.push_back(to_coef(x));
    }
    res.iterations = it;
  }

  // Coordinate sweeps with exact piecewise-linear line searches.
  void polish(SolveResult& res) {
    const auto m = design_.cols();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::mt19937_64 rng(cfg_.seed);
    std::shuffle(order.begin(), order.end(), rng);

    Eigen::VectorXd x = best_x_;
    Eigen::VectorXd z = design_.g * x;
    double p = objective_from_margins(design_, x, z, cm_, cfg_.r_n);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(m);
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool improved = false;
      for (auto j : order) {
        e.setZero();
        e[j] = 1.0;
        const Eigen::VectorXd gd = design_.g.col(j);
        const double t = exact_line_search(design_, cm_, cfg_.r_n, cfg_.c_lambda, x, z, e, gd);
        if (t == 0.0 || !std::isfinite(t)) continue;
        Eigen::VectorXd x_new = x;
        x_new[j] += t;
        const Eigen::VectorXd z_new = z + t * gd;
        const double p_new = objective_from_margins(design_, x_new, z_new, cm_, cfg_.r_n);
        if (p_new < p - 1e-15 * std::max(1.0, std::abs(p))) {
          x = std::move(x_new);
          z = z_new;
          p = p_new;
          improved = true;
        }
      }
      ++res.iterations;
      if (!improved) break;
    }
    if (has_ball(cfg_.c_lambda) && x.lpNorm<1>() > *cfg_.c_lambda) x = project_l1_ball(x, *cfg_.c_lambda);
    offer_primal(x);
  }

  void finish(SolveResult& res) {
    if (gap() > cfg_.tol && static_cast<std::size_t>(design_.rows() * design_.cols()) <= cfg_.lp_cap) {
      const auto lp = lp_oracle(design_, cm_, cfg_.r_n, cfg_.c_lambda, cfg_.lp_cap);
      if (lp.lower_bound > best_d_) {
        best_d_ = lp.lower_bound;
        res.used_lp_certificate = true;
      }
    }
    res.lam_hat = to_coef(best_x_);
    res.objective = best_p_;
    res.lower_bound = best_d_;
    res.gap_bound = std::max(0.0, gap());
    res.converged = res.gap_bound <= cfg_.tol;
  }

  const MarginDesign& design_;
  const CostModel& cm_;
  const SolveConfig& cfg_;
  Eigen::VectorXd best_x_;
  double best_p_ = kInf;
  double best_d_ = -kInf;
};

}  // namespace

MarginDesign empirical_design(const Dataset& data, const Dictionary& dict) {
  data.validate();
  const auto n = static_cast<Eigen::Index>(data.n());
  const auto m = static_cast<Eigen::Index>(dict.size());
  MarginDesign d{Eigen::MatrixXd(n, m), Eigen::VectorXd::Constant(n, 1.0 / double(n))};
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto vals = dict.values(data.x[static_cast<std::size_t>(i)]);
    for (Eigen::Index j = 0; j < m; ++j) d.g(i, j) = data.y[static_cast<std::size_t>(i)] * vals[static_cast<std::size_t>(j)];
  }
  return d;
}

MarginDesign population_design(const FiniteDistribution& dist, const Dictionary& dict) {
  const auto m = static_cast<Eigen::Index>(dict.size());
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const auto vals = dict.values(dist.points[k]);
    const double wp = dist.p[k] * dist.eta[k];
    const double wm = dist.p[k] * (1.0 - dist.eta[k]);
    if (wp > 0.0) {
      rows.push_back(vals);
      weights.push_back(wp);
    }
    if (wm > 0.0) {
      std::vector<double> neg(vals.size());
      std::transform(vals.begin(), vals.end(), neg.begin(), [](double v) { return -v; });
      rows.push_back(std::move(neg));
      weights.push_back(wm);
    }
  }
  MarginDesign d{Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), m),
                 Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()))};
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (Eigen::Index j = 0; j < m; ++j) d.g(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)];
    d.w[static_cast<Eigen::Index>(i)] = weights[i];
  }
  return d;
}

MarginDesign restrict_columns(const MarginDesign& design, std::span<const std::size_t> cols) {
  MarginDesign out{Eigen::MatrixXd(design.rows(), static_cast<Eigen::Index>(cols.size())), design.w};
  for (std::size_t c = 0; c < cols.size(); ++c) {
    if (static_cast<Eigen::Index>(cols[c]) >= design.cols()) throw std::invalid_argument("support index out of range");
    out.g.col(static_cast<Eigen::Index>(c)) = design.g.col(static_cast<Eigen::Index>(cols[c]));
  }
  return out;
}

double design_phi_risk(const MarginDesign& design, const Eigen::VectorXd& lam, const CostModel& cm) {
  if (lam.size() != design.cols()) throw std::invalid_argument("coefficient length mismatch");
  return risk_from_margins(design, design.g * lam, cm);
}

double design_objective(const MarginDesign& design, const Eigen::VectorXd& lam, const CostModel& cm, double r_n) {
  return design_phi_risk(design, lam, cm) + 2.0 * r_n * lam.lpNorm<1>();
}

double dual_lower_bound(const MarginDesign& design, const CostModel& cm, double r_n, std::optional<double> c_lambda,
                        const Eigen::VectorXd& y_in) {
  const double a = cm.a();
  Eigen::VectorXd y(y_in.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = std::clamp(y_in[i], -a * design.w[i], 0.0);
  auto conj_part = [&](double theta) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) s -= std::max(theta * y[i], -design.w[i]);
    return s;
  };
  const double vmax = (design.g.transpose() * y).lpNorm<Eigen::Infinity>();
  const double theta = vmax > 2.0 * r_n ? 2.0 * r_n / vmax : 1.0;
  double bound = conj_part(theta);
  if (has_ball(c_lambda)) bound = std::max(bound, conj_part(1.0) - *c_lambda * std::max(0.0, vmax - 2.0 * r_n));
  return bound;
}

Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double level) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double m = std::abs(v[j]) - level;
    out[j] = m > 0.0 ? std::copysign(m, v[j]) : 0.0;
  }
  return out;
}

Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("l1 ball radius must be nonnegative");
  if (v.lpNorm<1>() <= radius) return v;
  std::vector<double> u(static_cast<std::size_t>(v.size()));
  for (Eigen::Index j = 0; j < v.size(); ++j) u[static_cast<std::size_t>(j)] = std::abs(v[j]);
  std::sort(u.begin(), u.end(), std::greater<>());
  double cumsum = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cumsum += u[k];
    const double t = (cumsum - radius) / double(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return soft_threshold(v, theta);
}

void SolveConfig::validate() const {
  if (!(r_n >= 0.0) || !std::isfinite(r_n)) throw std::invalid_argument("r_n must be a nonnegative number");
  if (c_lambda && !(*c_lambda > 0.0)) throw std::invalid_argument("c_lambda must be positive");
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (max_iter == 0) throw std::invalid_argument("max_iter must be positive");
  if (r_n == 0.0 && !has_ball(c_lambda)) throw std::invalid_argument("r_n = 0 requires an l1 ball radius");
}

double penalized_objective(const Dataset& data, const Dictionary& dict, const Coefficients& lam, const CostModel& cm,
                           double r_n) {
  if (!(r_n >= 0.0)) throw std::invalid_argument("r_n must be nonnegative");
  return empirical_phi_risk(data, dict, lam, cm) + 2.0 * r_n * l1_norm(lam);
}

SolveResult solve_design(const MarginDesign& design, const CostModel& cm, const SolveConfig& cfg) {
  cfg.validate();
  PenalizedSolver solver(design, cm, cfg);
  return solver.run();
}

SolveResult solve(const Dataset& data, const Dictionary& dict, const CostModel& cm, const SolveConfig& cfg) {
  return solve_design(empirical_design(data, dict), cm, cfg);
}

LpOracleResult lp_oracle(const MarginDesign& design, const CostModel& cm, double r_n, std::optional<double> c_lambda,
                         std::size_t cap) {
  if (!(r_n >= 0.0)) throw std::invalid_argument("r_n must be nonnegative");
  const auto n = design.rows();
  const auto m = design.cols();
  if (static_cast<std::size_t>(n * m) > cap) {
    throw std::invalid_argument("LP oracle size cap exceeded: " + std::to_string(n * m) + " > " + std::to_string(cap));
  }
  const double a = cm.a();
  const bool ball = has_ball(c_lambda);
  const Eigen::Index nv = 2 * n + (ball ? 1 : 0);
  const Eigen::Index nc = n + 2 * m;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nc, nv);
  Eigen::VectorXd b(nc);
  Eigen::VectorXd c = Eigen::VectorXd::Ones(nv);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, i) = 1.0;
    A(i, n + i) = 1.0;
    b[i] = design.w[i];
  }
  for (Eigen::Index j = 0; j < m; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      A(n + j, i) = design.g(i, j);
      A(n + j, n + i) = a * design.g(i, j);
      A(n + m + j, i) = -design.g(i, j);
      A(n + m + j, n + i) = -a * design.g(i, j);
    }
    b[n + j] = 2.0 * r_n;
    b[n + m + j] = 2.0 * r_n;
    if (ball) {
      A(n + j, 2 * n) = -1.0;
      A(n + m + j, 2 * n) = -1.0;
    }
  }
  if (ball) c[2 * n] = -*c_lambda;

  const auto sx = simplex_max(A, b, c);
  if (sx.status != LpStatus::optimal) throw std::runtime_error("LP oracle: simplex did not reach optimality");

  LpOracleResult out;
  Eigen::VectorXd lam(m);
  for (Eigen::Index j = 0; j < m; ++j) lam[j] = sx.dual[n + j] - sx.dual[n + m + j];
  if (ball && lam.lpNorm<1>() > *c_lambda) lam = project_l1_ball(lam, *c_lambda);
  out.dual_y = Eigen::VectorXd(n);
  for (Eigen::Index i = 0; i < n; ++i) out.dual_y[i] = -(sx.x[i] + a * sx.x[n + i]);
  out.lam = to_coef(lam);
  out.objective = design_objective(design, lam, cm, r_n);
  out.lower_bound = dual_lower_bound(design, cm, r_n, c_lambda, out.dual_y);
  out.lp_value = sx.value;
  out.pivots = sx.pivots;
  return out;
}

LpOracleResult lp_oracle(const Dataset& data, const Dictionary& dict, const CostModel& cm, double r_n,
                         std::optional<double> c_lambda, std::size_t cap) {
  return lp_oracle(empirical_design(data, dict), cm, r_n, c_lambda, cap);
}

Coefficients solve_on_support(const MarginDesign& design, const CostModel& cm, std::span<const std::size_t> support,
                              std::optional<double> c_lambda, std::size_t cap) {
  if (support.empty()) throw std::invalid_argument("support must be nonempty");
  const auto sub = restrict_columns(design, support);
  Coefficients local;
  if (static_cast<std::size_t>(sub.rows() * sub.cols()) <= cap) {
    local = lp_oracle(sub, cm, 0.0, c_lambda, cap).lam;
  } else {
    SolveConfig cfg;
    cfg.r_n = 0.0;
    cfg.c_lambda = c_lambda;
    local = solve_design(sub, cm, cfg).lam_hat;
  }
  Coefficients full(static_cast<std::size_t>(design.cols()));
  for (std::size_t c = 0; c < support.size(); ++c) full[support[c]] = local[c];
  return full;
}

Coefficients solve_on_support(const Dataset& data, const Dictionary& dict, const CostModel& cm,
                              std::span<const std::size_t> support, std::optional<double> c_lambda) {
  return solve_on_support(empirical_design(data, dict), cm, support, c_lambda);
}

bool basic_inequality_check(const Dataset& data, const Dictionary& dict, const CostModel& cm, double r_n,
                            const SolveResult& result, std::span<const Coefficients> probes, double tol) {
  const double base = penalized_objective(data, dict, result.lam_hat, cm, r_n);
  const Coefficients zero(dict.size());
  if (base > penalized_objective(data, dict, zero, cm, r_n) + tol) return false;
  return std::all_of(probes.begin(), probes.end(), [&](const Coefficients& probe) {
    return base <= penalized_objective(data, dict, probe, cm, r_n) + tol;
  });
}

}  // namespace rejlasso
