#ifndef REJLASSO_TESTS_SUPPORT_HPP
#define REJLASSO_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "rejlasso/experiments.hpp"
#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"
#include "rejlasso/risk.hpp"

namespace testing_support {

using namespace rejlasso;

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform01(); }

inline CostModel random_cost_model(Rng& rng, double d_lo = 0.05, double d_hi = 0.5) {
  const double d = uniform(rng, d_lo, d_hi);
  const double tau = uniform(rng, d, 1.0 - d);
  return CostModel(d, std::min(tau, 1.0 - d));
}

/// Points {0, ..., k-1} on the line with random masses and eta.
inline FiniteDistribution random_distribution(Rng& rng, std::size_t k) {
  FiniteDistribution dist;
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    dist.points.push_back({static_cast<double>(i)});
    dist.p.push_back(0.05 + rng.uniform01());
    total += dist.p.back();
    dist.eta.push_back(rng.uniform01());
  }
  for (auto& p : dist.p) p /= total;
  return dist;
}

/// Stumps at random midpoints of {0, ..., k-1} with random polarity.
inline Dictionary random_stumps(Rng& rng, std::size_t k, std::size_t m) {
  std::vector<BaseFunction> fs;
  for (std::size_t j = 0; j < m; ++j) {
    const double t = static_cast<double>(rng.index(k)) + 0.5;
    fs.push_back(SignStump{0, t, rng.bernoulli(0.5) ? 1 : -1});
  }
  return Dictionary(std::move(fs), 1.0);
}

inline Coefficients random_coefficients(Rng& rng, std::size_t m, double scale) {
  Coefficients lam(m);
  for (std::size_t j = 0; j < m; ++j) lam[j] = uniform(rng, -scale, scale);
  return lam;
}

inline Dataset random_dataset(Rng& rng, std::size_t n, std::size_t k) {
  const auto dist = random_distribution(rng, k);
  return sample_dataset(dist, n, rng.next());
}

}  // namespace testing_support

#endif  // REJLASSO_TESTS_SUPPORT_HPP
