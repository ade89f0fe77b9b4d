#ifndef REJLASSO_MODEL_HPP
#define REJLASSO_MODEL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rejlasso/config.hpp"
#include "rejlasso/losses.hpp"

namespace rejlasso {

using FeatureVector = std::vector<double>;

/// polarity * (+1 if x[feature] >= threshold else -1).
struct SignStump {
  std::size_t feature = 0;
  double threshold = 0.0;
  int polarity = 1;
};

/// clamp(<weights, x> + bias, -clip, clip).
struct ClippedAffine {
  std::vector<double> weights;
  double bias = 0.0;
  double clip = 1.0;
};

/// 1 on an exact match with `point`, 0 elsewhere.
struct PointIndicator {
  FeatureVector point;
};

/// Value table over support points; 0 off the table.
struct Tabulated {
  std::vector<FeatureVector> points;
  std::vector<double> values;
};

using BaseFunction = std::variant<SignStump, ClippedAffine, PointIndicator, Tabulated>;

double evaluate(const BaseFunction& f, std::span<const double> x);
/// Analytic bound on sup_x |f(x)|.
double sup_bound(const BaseFunction& f);
std::string family_name(const BaseFunction& f);

/// Ordered dictionary f_1..f_M with a declared sup-norm bound C_F.
class Dictionary {
 public:
  /// Throws std::invalid_argument if empty, malformed, or some family's analytic bound
  /// exceeds `c_f`.
  Dictionary(std::vector<BaseFunction> functions, double c_f);

  std::size_t size() const noexcept { return functions_.size(); }
  double c_f() const noexcept { return c_f_; }
  const std::vector<BaseFunction>& functions() const noexcept { return functions_; }
  const BaseFunction& operator[](std::size_t j) const { return functions_.at(j); }

  double value(std::size_t j, std::span<const double> x) const;
  /// (f_1(x), ..., f_M(x)).
  std::vector<double> values(std::span<const double> x) const;

  /// Exhaustive |f_j(x)| <= C_F check over `points`; throws std::invalid_argument on a
  /// violation.
  void check_bound_on(std::span<const FeatureVector> points) const;

  KeyValueDoc to_doc() const;
  std::string serialize() const { return to_doc().to_text(); }
  static Dictionary from_doc(const KeyValueDoc& doc);
  static Dictionary parse(std::string_view text) { return from_doc(KeyValueDoc::parse(text)); }

  friend bool operator==(const Dictionary&, const Dictionary&);

 private:
  std::vector<BaseFunction> functions_;
  double c_f_;
};

bool operator==(const SignStump&, const SignStump&);
bool operator==(const ClippedAffine&, const ClippedAffine&);
bool operator==(const PointIndicator&, const PointIndicator&);
bool operator==(const Tabulated&, const Tabulated&);

/// One indicator per point: orthogonal under any measure on those points.
Dictionary indicator_dictionary(std::span<const FeatureVector> points);

/// Sign stumps on one feature, one per threshold.
Dictionary stump_dictionary(std::size_t feature, std::span<const double> thresholds, int polarity = 1);

/// Coefficient vector lambda.
struct Coefficients {
  std::vector<double> values;

  Coefficients() = default;
  explicit Coefficients(std::size_t m) : values(m, 0.0) {}
  explicit Coefficients(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t j) const { return values[j]; }
  double& operator[](std::size_t j) { return values[j]; }

  friend bool operator==(const Coefficients&, const Coefficients&) = default;
};

enum class RejectDecision { minus, reject, plus };

std::string to_string(RejectDecision d);

/// f_lambda(x) = sum_j lambda_j f_j(x). Throws std::invalid_argument on length mismatch.
double evaluate(const Dictionary& dict, const Coefficients& lam, std::span<const double> x);

/// plus if score > tau, minus if score < -tau, reject otherwise.
RejectDecision classify(double score, const CostModel& cm) noexcept;

double l1_norm(const Coefficients& lam) noexcept;
double l1_distance(const Coefficients& a, const Coefficients& b);

/// Number of entries with |lambda_j| > zero_tol.
std::size_t l0_count(const Coefficients& lam, double zero_tol = 0.0);
std::vector<std::size_t> support(const Coefficients& lam, double zero_tol = 0.0);

/// Default tolerance for reporting support sets of solver output.
inline constexpr double kReportZeroTol = 1e-9;

}  // namespace rejlasso

#endif  // REJLASSO_MODEL_HPP
