#ifndef REJLASSO_THEORY_HPP
#define REJLASSO_THEORY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <span>
#include <vector>

#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"
#include "rejlasso/risk.hpp"

namespace rejlasso {

/// The measure eta (1 - eta) dP on a finite support, with the dictionary Gram matrix.
struct MeasureMu {
  std::vector<double> weights;
  /// gram(i, j) = sum_k mu_k f_i(x_k) f_j(x_k).
  Eigen::MatrixXd gram;

  double total_mass() const;
  bool gram_is_psd(double tol = 1e-10) const;
};

MeasureMu measure_mu(const FiniteDistribution& dist, const Dictionary& dict);

/// sqrt(sum_k mu_k (a_k - b_k)^2) for functions given by their values on the support.
double mu_distance(const MeasureMu& mu, std::span<const double> a, std::span<const double> b);

struct CoherenceReport {
  double c_mu = 0.0;
  Eigen::MatrixXd correlations;
  double rho_star = 0.0;
  std::size_t support_size = 0;
  bool condition2_holds = false;
};

/// Throws std::invalid_argument if some dictionary element has zero mu-norm.
CoherenceReport coherence(const MeasureMu& mu, std::span<const std::size_t> support);

struct MarginParams {
  double a_margin = 1.0;
  /// May be +infinity (eta bounded away from d and 1 - d).
  double alpha = 0.0;
  double beta = 0.0;
  double c_delta_mu = 0.0;
};

double beta_from_alpha(double alpha);
/// (1 + alpha) / (2 + alpha), the exponent of r_n^2 |lambda|_0 in the rate; 1 at alpha = inf.
double rate_exponent(double alpha);

/// Throws std::invalid_argument unless A >= 1, alpha >= 0, c_lambda > 0, c_f > 0.
MarginParams margin_constants(const CostModel& cm, double a_margin, double alpha, double c_lambda, double c_f);

struct MarginCheck {
  bool holds = true;
  /// First t at which an inequality fails.
  double violating_t = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
};

/// P{|eta - c| <= t} for c = d and c = 1 - d, checked against A t^alpha at each grid point.
MarginCheck verify_margin_condition(const FiniteDistribution& dist, const CostModel& cm, double a_margin, double alpha,
                                    std::span<const double> t_grid);
/// The same check at every t > 0, exact: the left sides are step functions that jump
/// only at the distances |eta_k - d| and |eta_k - (1 - d)|.
MarginCheck verify_margin_condition_exact(const FiniteDistribution& dist, const CostModel& cm, double a_margin,
                                          double alpha);
/// Largest alpha for which the exact check passes with constant A (may be +inf).
double max_margin_exponent(const FiniteDistribution& dist, const CostModel& cm, double a_margin);

struct Condition1Report {
  double distance = 0.0;
  double delta_phi = 0.0;
  double distance_bound = 0.0;
  bool distance_holds = false;
  double mean_rho_eta = 0.0;
  double delta_phi_lower = 0.0;
  bool lower_holds = false;
};

/// rho_eta(f, f0): eta |f - f0| if eta < d and f < -1, (1 - eta) |f - f0| if eta > 1 - d
/// and f > 1, |f - f0| otherwise.
double rho_eta(double f, double f0, double eta, const CostModel& cm);

Condition1Report condition1_check(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                                  const CostModel& cm, const MarginParams& mp, double tol = 1e-12);

/// 2 (8 C / c_mu)^{1/(1-beta)} (r_n^2 l0)^{1/(2-2beta)}.
double complexity_term(const MarginParams& mp, double c_mu, double r_n, std::size_t l0);
double oracle_criterion(double delta_phi, std::size_t l0, const MarginParams& mp, double c_mu, double r_n);
double oracle_criterion(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                        const CostModel& cm, const MarginParams& mp, double c_mu, double r_n);

/// Excess surrogate risk of f_lambda over the Bayes rule.
double delta_phi(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam, const CostModel& cm);

struct OracleResult {
  Coefficients lam_star;
  std::vector<std::size_t> support;
  double criterion = 0.0;
  double delta_phi = 0.0;
  double c_mu = 0.0;
  std::size_t supports_evaluated = 0;
};

inline constexpr std::size_t kOracleBudget = 5000;

/// Minimizes the oracle criterion over supports of size <= k_max, with coefficients in
/// { |lambda|_1 <= min(c_lambda, 1 / (2 r_n)) }. Supports are visited by size, then
/// lexicographically; a later support must improve strictly to win.
OracleResult oracle_search(const FiniteDistribution& dist, const Dictionary& dict, const CostModel& cm,
                           const MarginParams& mp, double r_n, std::size_t k_max, std::optional<double> c_lambda,
                           std::size_t budget = kOracleBudget);

struct RhatBound {
  /// Maximum ratio over the candidates: a lower bound on the supremum.
  double value = 0.0;
  /// 2 C_phi C_F.
  double cap = 0.0;
  std::size_t candidates = 0;
};

/// Lower bound on sup over Lambda_n of
///   |(Rhat - R)(lambda) - (Rhat - R)(lambda*)| / (|lambda - lambda*|_1 + eps_n),
/// eps_n = 1 / (n r_n), from perturbations of lambda*, random points of Lambda_n, scaled
/// vertices and any `extra` candidates (projected into Lambda_n).
RhatBound rhat_lower_bound(const Dataset& data, const FiniteDistribution& dist, const Dictionary& dict,
                           const CostModel& cm, const Coefficients& lam_star, double r_n, std::size_t n_candidates,
                           std::uint64_t seed, std::optional<double> c_lambda = std::nullopt,
                           std::span<const Coefficients> extra = {});

/// Smallest J >= 0 with 2^J >= n.
int j_n(std::size_t n);
double rhat_mean_bound(std::size_t n, std::size_t m, const CostModel& cm, double c_f);

struct TuningReport {
  double rhat_lb = 0.0;
  double rhat_cap = 0.0;
  double mean_bound = 0.0;
  int j_n = 0;
  double delta = 0.0;
  double rn_recommended = 0.0;
  double eps_n = 0.0;
};

/// Throws std::invalid_argument unless 0 < delta < 1 and n, m >= 1.
TuningReport recommended_rn(std::size_t n, std::size_t m, const CostModel& cm, double c_f, double delta);

struct OracleSides {
  double lhs_phi = 0.0;
  double lhs_reject = 0.0;
  double rhs = 0.0;
  double complexity = 0.0;
};

OracleSides oracle_inequality_sides(const FiniteDistribution& dist, const Dictionary& dict, const CostModel& cm,
                                    const MarginParams& mp, double c_mu, const Coefficients& lam_hat,
                                    const Coefficients& lam_star, double r_n, std::size_t n);

struct TailPoint {
  double t = 0.0;
  double empirical = 0.0;
  double bound = 0.0;
  double slack = 0.0;
  bool ok = true;
};

struct TailReport {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<TailPoint> points;
  bool all_ok = true;
};

/// Empirical P{rhat - mean >= t} against exp(-n t^2 / (2 C_phi^2 C_F^2)) with a 3 sigma
/// binomial allowance. Thresholds default to 20 multiples of C_phi C_F / (4 sqrt n).
/// Throws std::invalid_argument with fewer than 100 samples.
TailReport concentration_tail(std::span<const double> samples, const CostModel& cm, double c_f, std::size_t n,
                              std::span<const double> t_grid = {});

nlohmann::json to_json(const CoherenceReport& r);
nlohmann::json to_json(const MarginParams& p);
nlohmann::json to_json(const TuningReport& t);
nlohmann::json to_json(const TailReport& t);

}  // namespace rejlasso

#endif  // REJLASSO_THEORY_HPP
