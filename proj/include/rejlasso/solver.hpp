#ifndef REJLASSO_SOLVER_HPP
#define REJLASSO_SOLVER_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"
#include "rejlasso/risk.hpp"

namespace rejlasso {

/// Weighted margin design: g(i, j) = y_i f_j(x_i), nonnegative row weights w.
///
/// The empirical risk uses w_i = 1/n. A finite distribution expands into two rows per
/// support point (one per label) with weights p_k eta_k and p_k (1 - eta_k), so the
/// population risk is the same weighted sum. Zero-weight rows are dropped.
struct MarginDesign {
  Eigen::MatrixXd g;
  Eigen::VectorXd w;

  Eigen::Index rows() const noexcept { return g.rows(); }
  Eigen::Index cols() const noexcept { return g.cols(); }
};

MarginDesign empirical_design(const Dataset& data, const Dictionary& dict);
MarginDesign population_design(const FiniteDistribution& dist, const Dictionary& dict);
MarginDesign restrict_columns(const MarginDesign& design, std::span<const std::size_t> cols);

/// sum_i w_i phi_d((G lambda)_i).
double design_phi_risk(const MarginDesign& design, const Eigen::VectorXd& lam, const CostModel& cm);
/// design_phi_risk + 2 r |lambda|_1.
double design_objective(const MarginDesign& design, const Eigen::VectorXd& lam, const CostModel& cm, double r_n);

/// Lower bound on min { design_objective : |lambda|_1 <= c_lambda } from any dual point y
/// (clamped into its box [-a w, 0] and rescaled into the feasible set).
double dual_lower_bound(const MarginDesign& design, const CostModel& cm, double r_n, std::optional<double> c_lambda,
                        const Eigen::VectorXd& y);

/// Euclidean projection onto { |x|_1 <= radius }.
Eigen::VectorXd project_l1_ball(const Eigen::VectorXd& v, double radius);
Eigen::VectorXd soft_threshold(const Eigen::VectorXd& v, double level);

struct SolveConfig {
  double r_n = 0.0;
  /// Radius of the hard constraint |lambda|_1 <= c_lambda, if any.
  std::optional<double> c_lambda;
  /// Target certified optimality gap.
  double tol = 1e-8;
  std::size_t max_iter = 100000;
  /// Seeds the coordinate order of the polish sweeps.
  std::uint64_t seed = 0;
  /// Largest rows * cols for which the LP oracle may be used to certify.
  std::size_t lp_cap = 10000;
  /// Optional line-oriented trace: "iteration objective gap".
  std::ostream* trace = nullptr;

  void validate() const;
};

struct SolveResult {
  Coefficients lam_hat;
  double objective = 0.0;
  /// Certified upper bound on objective - global minimum.
  double gap_bound = 0.0;
  double lower_bound = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool used_lp_certificate = false;
  /// A few intermediate iterates (restart points), useful as probe candidates.
  std::vector<Coefficients> snapshots;
};

double penalized_objective(const Dataset& data, const Dictionary& dict, const Coefficients& lam, const CostModel& cm,
                           double r_n);

/// Minimizes the penalized empirical surrogate risk, optionally over an l1 ball.
///
/// Stages: a short proximal subgradient warm start (soft-thresholding prox, 1/sqrt(t)
/// steps), restarted primal-dual hybrid gradient with iterate averaging, then exact
/// coordinate-wise piecewise-linear line searches. The gap is certified by weak duality,
/// and by the LP oracle when the dual bound alone is not tight enough and the instance is
/// under `lp_cap`. Not converging within the budget is reported, never hidden.
SolveResult solve(const Dataset& data, const Dictionary& dict, const CostModel& cm, const SolveConfig& cfg);
SolveResult solve_design(const MarginDesign& design, const CostModel& cm, const SolveConfig& cfg);

struct LpOracleResult {
  Coefficients lam;
  /// Objective evaluated at `lam`.
  double objective = 0.0;
  /// Weak-duality lower bound from the simplex dual solution.
  double lower_bound = 0.0;
  double lp_value = 0.0;
  Eigen::VectorXd dual_y;
  std::size_t pivots = 0;
};

inline constexpr std::size_t kDefaultLpCap = 10000;

/// Exact LP reformulation of the penalized problem, solved through its dual with the
/// dense simplex. Throws std::invalid_argument above the size cap.
LpOracleResult lp_oracle(const MarginDesign& design, const CostModel& cm, double r_n, std::optional<double> c_lambda,
                         std::size_t cap = kDefaultLpCap);
LpOracleResult lp_oracle(const Dataset& data, const Dictionary& dict, const CostModel& cm, double r_n,
                         std::optional<double> c_lambda, std::size_t cap = kDefaultLpCap);

/// Minimizes the unpenalized risk over coefficients vanishing off `support`, subject to
/// the optional l1 ball. Returns full-length coefficients.
Coefficients solve_on_support(const MarginDesign& design, const CostModel& cm, std::span<const std::size_t> support,
                              std::optional<double> c_lambda, std::size_t cap = kDefaultLpCap);
Coefficients solve_on_support(const Dataset& data, const Dictionary& dict, const CostModel& cm,
                              std::span<const std::size_t> support, std::optional<double> c_lambda);

/// True iff objective(lam_hat) <= objective(probe) + tol for every probe.
bool basic_inequality_check(const Dataset& data, const Dictionary& dict, const CostModel& cm, double r_n,
                            const SolveResult& result, std::span<const Coefficients> probes, double tol);

}  // namespace rejlasso

#endif  // REJLASSO_SOLVER_HPP
