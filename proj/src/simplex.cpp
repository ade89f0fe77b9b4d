#include "rejlasso/simplex.hpp"

#include <stdexcept>
#include <vector>

namespace rejlasso {

namespace {

// Compact tableau: row i reads x_B[i] = T(i, n) - sum_j T(i, j) x_N[j]; the last row holds
// reduced costs and the objective value.
class Tableau {
 public:
  Tableau(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c)
      : m_(A.rows()), n_(A.cols()), t_(m_ + 1, n_ + 1), basis_(m_), nonbasis_(n_) {
    t_.topLeftCorner(m_, n_) = A;
    t_.topRightCorner(m_, 1) = b;
    t_.bottomLeftCorner(1, n_) = -c.transpose();
    t_(m_, n_) = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = n_ + i;
    for (Eigen::Index j = 0; j < n_; ++j) nonbasis_[j] = j;
  }

  void pivot(Eigen::Index r, Eigen::Index s) {
    const double inv = 1.0 / t_(r, s);
    for (Eigen::Index i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = t_(i, s) * inv;
      if (f == 0.0) continue;
      t_.row(i) -= f * t_.row(r);
      t_(i, s) = -f;
    }
    t_.row(r) *= inv;
    t_(r, s) = inv;
    std::swap(basis_[r], nonbasis_[s]);
  }

  Eigen::Index entering(double eps, bool bland) const {
    Eigen::Index best = -1;
    for (Eigen::Index j = 0; j < n_; ++j) {
      const double rc = t_(m_, j);
      if (rc >= -eps) continue;
      if (best < 0) {
        best = j;
      } else if (bland) {
        if (nonbasis_[j] < nonbasis_[best]) best = j;
      } else if (rc < t_(m_, best) || (rc == t_(m_, best) && nonbasis_[j] < nonbasis_[best])) {
        best = j;
      }
    }
    return best;
  }

  Eigen::Index leaving(Eigen::Index s, double eps) const {
    Eigen::Index best = -1;
    double best_ratio = 0.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (t_(i, s) <= eps) continue;
      const double ratio = t_(i, n_) / t_(i, s);
      if (best < 0 || ratio < best_ratio || (ratio == best_ratio && basis_[i] < basis_[best])) {
        best = i;
        best_ratio = ratio;
      }
    }
    return best;
  }

  SimplexResult run(const SimplexOptions& opts) {
    SimplexResult res;
    std::size_t streak = 0;
    while (true) {
      const bool bland = streak >= opts.degenerate_streak;
      const auto s = entering(opts.eps, bland);
      if (s < 0) {
        res.status = LpStatus::optimal;
        break;
      }
      const auto r = leaving(s, opts.eps);
      if (r < 0) {
        res.status = LpStatus::unbounded;
        break;
      }
      if (res.pivots >= opts.max_pivots) {
        res.status = LpStatus::iteration_limit;
        break;
      }
      streak = t_(r, n_) <= opts.eps ? streak + 1 : 0;
      pivot(r, s);
      ++res.pivots;
      // Clamp round-off so the basic solution stays primal feasible.
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (t_(i, n_) < 0.0) t_(i, n_) = 0.0;
      }
    }
    res.value = t_(m_, n_);
    res.x = Eigen::VectorXd::Zero(n_);
    res.dual = Eigen::VectorXd::Zero(m_);
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[i] < n_) res.x[basis_[i]] = t_(i, n_);
    }
    for (Eigen::Index j = 0; j < n_; ++j) {
      if (nonbasis_[j] >= n_) res.dual[nonbasis_[j] - n_] = t_(m_, j);
    }
    return res;
  }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> t_;
  std::vector<Eigen::Index> basis_;
  std::vector<Eigen::Index> nonbasis_;
};

}  // namespace

SimplexResult simplex_max(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const Eigen::VectorXd& c,
                          const SimplexOptions& opts) {
  if (A.rows() != b.size() || A.cols() != c.size()) throw std::invalid_argument("simplex: dimension mismatch");
  if ((b.array() < 0.0).any()) throw std::invalid_argument("simplex: right-hand side must be nonnegative");
  Tableau t(A, b, c);
  return t.run(opts);
}

}  // namespace rejlasso
