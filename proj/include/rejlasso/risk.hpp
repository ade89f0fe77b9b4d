#ifndef REJLASSO_RISK_HPP
#define REJLASSO_RISK_HPP

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"

namespace rejlasso {

/// Labelled sample (x_i, y_i), y_i in {-1, +1}.
struct Dataset {
  std::vector<FeatureVector> x;
  std::vector<int> y;

  std::size_t n() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return x.empty() ? 0 : x.front().size(); }

  /// Throws std::invalid_argument unless n >= 1, labels are +-1 and all rows share a
  /// dimension.
  void validate() const;

  Dataset subset(std::span<const std::size_t> rows) const;

  /// Comma-separated rows, features then label. A header is detected by a non-numeric
  /// first token.
  static Dataset parse_csv(std::string_view text);
  static Dataset load_csv(const std::string& path);
  std::string to_csv() const;

  /// Stable content hash of the canonical CSV form.
  std::string digest() const;
};

/// Exact finite-support law of (X, Y): point x_k with mass p_k and P{Y=+1|X=x_k} = eta_k.
struct FiniteDistribution {
  std::vector<FeatureVector> points;
  std::vector<double> p;
  std::vector<double> eta;

  std::size_t size() const noexcept { return points.size(); }

  /// p_k > 0 summing to 1 within 1e-12, eta in [0, 1], distinct points of equal
  /// dimension. Throws std::invalid_argument otherwise.
  void validate() const;

  /// Columns (features..., p, eta).
  static FiniteDistribution parse_csv(std::string_view text);
  static FiniteDistribution load_csv(const std::string& path);
  std::string to_csv() const;
};

struct RiskReport {
  double phi_risk = 0.0;
  double reject_risk = 0.0;
  double bayes_phi_risk = 0.0;
  double bayes_reject_risk = 0.0;
  double excess_phi = 0.0;
  double excess_reject = 0.0;
};

/// Values of f_lambda on the support points.
std::vector<double> scores_on_support(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam);
/// Generalized Bayes rule on the support points, in {-1, 0, +1}.
std::vector<double> bayes_scores(const FiniteDistribution& dist, const CostModel& cm);

double empirical_phi_risk(const Dataset& data, const Dictionary& dict, const Coefficients& lam, const CostModel& cm);
double empirical_reject_risk(const Dataset& data, const Dictionary& dict, const Coefficients& lam, const CostModel& cm);

/// Exact expectations given per-point scores f(x_k).
double population_phi_risk(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm);
double population_reject_risk(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm);

double population_phi_risk(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                           const CostModel& cm);
double population_reject_risk(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                              const CostModel& cm);

/// E[min(eta, 1 - eta, d)].
double bayes_reject_risk(const FiniteDistribution& dist, const CostModel& cm);
/// Surrogate risk of the generalized Bayes rule.
double bayes_phi_risk(const FiniteDistribution& dist, const CostModel& cm);
/// Per-point minimum of the conditional surrogate risk over all real scores. The
/// conditional risk is piecewise linear with kinks at -1, 0, 1 and nonincreasing /
/// nondecreasing beyond them, so the kinks suffice.
double minimal_phi_risk_by_kinks(const FiniteDistribution& dist, const CostModel& cm);

/// Clamps excesses within -1e-12 of zero; throws std::logic_error on larger negative
/// excess or when Delta_reject > Delta_phi + 1e-12.
RiskReport excess_risks(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm);
RiskReport excess_risks(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                        const CostModel& cm);

inline constexpr double kExcessTolerance = 1e-12;

}  // namespace rejlasso

#endif  // REJLASSO_RISK_HPP
