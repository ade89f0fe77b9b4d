#ifndef REJLASSO_SIMPLEX_HPP
#define REJLASSO_SIMPLEX_HPP

#include <Eigen/Dense>
#include <cstddef>

namespace rejlasso {

enum class LpStatus { optimal, unbounded, iteration_limit };

struct SimplexOptions {
  /// Pivot elements and reduced costs below this are treated as zero.
  double eps = 1e-11;
  std::size_t max_pivots = 200000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  std::size_t degenerate_streak = 50;
};

struct SimplexResult {
  LpStatus status = LpStatus::iteration_limit;
  double value = 0.0;
  Eigen::VectorXd x;     ///< primal solution
  Eigen::VectorXd dual;  ///< one multiplier per constraint row
  std::size_t pivots = 0;
};

/// Dense tableau simplex for  max c'x  s.t.  A x <= b, x >= 0  with b >= 0, so the
/// all-slack basis is feasible and no phase one is needed. Dantzig pricing with a
/// lowest-index tie-break; falls back to Bland's rule during degenerate streaks so the
/// method cannot cycle. Deterministic.
SimplexResult simplex_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                          const SimplexOptions& opts = {});

}  // namespace rejlasso

#endif  // REJLASSO_SIMPLEX_HPP
