#ifndef REJLASSO_LOSSES_HPP
#define REJLASSO_LOSSES_HPP

#include <vector>

namespace rejlasso {

/// Smallest admissible rejection cost. The surrogate slope (1-d)/d diverges as d -> 0.
inline constexpr double kMinRejectCost = 1e-6;

/// Rejection cost d and reject threshold tau, with the derived surrogate slope.
///
/// Valid models satisfy kMinRejectCost <= d <= 1/2 and d <= tau <= 1 - d. The upper
/// bound on tau is tested as `1 - tau >= d` so that `1 - z >= d` holds in floating
/// point for every |z| <= tau.
class CostModel {
 public:
  /// Throws std::invalid_argument when (d, tau) is outside the admissible region.
  CostModel(double d, double tau);

  static bool is_valid(double d, double tau) noexcept;

  double d() const noexcept { return d_; }
  double tau() const noexcept { return tau_; }
  /// Slope of the surrogate on negative margins, (1-d)/d >= 1.
  double a() const noexcept { return a_; }
  /// Lipschitz constant of the surrogate; equal to a().
  double c_phi() const noexcept { return a_; }

 private:
  double d_;
  double tau_;
  double a_;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo;
  double hi;

  bool contains(double v) const noexcept { return lo <= v && v <= hi; }
};

/// Discontinuous reject loss: 1 below -tau, d on [-tau, tau], 0 above tau.
double reject_loss(double z, const CostModel& cm) noexcept;

/// Generalized hinge loss: 1 - a z for z < 0, 1 - z on [0, 1), 0 beyond.
double phi_d(double z, const CostModel& cm) noexcept;

/// Subdifferential of phi_d at z.
Interval phi_d_subdifferential(double z, const CostModel& cm) noexcept;

/// eta * phi_d(z) + (1 - eta) * phi_d(-z).
double conditional_phi_risk(double z, double eta, const CostModel& cm);

/// Generalized Bayes score: -1 if eta < d, +1 if eta > 1 - d, 0 otherwise.
int bayes_score(double eta, const CostModel& cm);

/// Minimizes the conditional surrogate risk over a grid of [-2, 2] with spacing
/// `grid_step` (the kinks -1, 0, 1 are always on the grid) and returns every grid
/// point whose value ties the minimum, sorted ascending.
std::vector<double> calibration_check(double eta, const CostModel& cm, double grid_step);

}  // namespace rejlasso

#endif  // REJLASSO_LOSSES_HPP
