#include "rejlasso/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rejlasso {

namespace {

void check_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    throw std::invalid_argument("conditional probability outside [0, 1]: " + std::to_string(eta));
  }
}

}  // namespace

bool CostModel::is_valid(double d, double tau) noexcept {
  return std::isfinite(d) && std::isfinite(tau) && d >= kMinRejectCost && d <= 0.5 && tau >= d &&
         1.0 - tau >= d;
}

CostModel::CostModel(double d, double tau) : d_(d), tau_(tau), a_((1.0 - d) / d) {
  if (!is_valid(d, tau)) {
    throw std::invalid_argument("invalid cost model: need 1e-6 <= d <= 1/2 and d <= tau <= 1-d (d=" +
                                std::to_string(d) + ", tau=" + std::to_string(tau) + ")");
  }
}

double reject_loss(double z, const CostModel& cm) noexcept {
  if (z < -cm.tau()) return 1.0;
  if (z <= cm.tau()) return cm.d();
  return 0.0;
}

double phi_d(double z, const CostModel& cm) noexcept {
  if (z < 0.0) return 1.0 - cm.a() * z;
  if (z < 1.0) return 1.0 - z;
  return 0.0;
}

Interval phi_d_subdifferential(double z, const CostModel& cm) noexcept {
  const double a = cm.a();
  if (z < 0.0) return {-a, -a};
  if (z == 0.0) return {-a, -1.0};
  if (z < 1.0) return {-1.0, -1.0};
  if (z == 1.0) return {-1.0, 0.0};
  return {0.0, 0.0};
}

double conditional_phi_risk(double z, double eta, const CostModel& cm) {
  check_eta(eta);
  return eta * phi_d(z, cm) + (1.0 - eta) * phi_d(-z, cm);
}

int bayes_score(double eta, const CostModel& cm) {
  check_eta(eta);
  if (eta < cm.d()) return -1;
  if (eta > 1.0 - cm.d()) return 1;
  return 0;
}

std::vector<double> calibration_check(double eta, const CostModel& cm, double grid_step) {
  if (!(grid_step > 0.0) || !std::isfinite(grid_step)) {
    throw std::invalid_argument("calibration grid step must be positive");
  }
  check_eta(eta);
  const auto half = static_cast<long long>(std::ceil(2.0 / grid_step));
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(2 * half + 4));
  for (long long k = -half; k <= half; ++k) {
    grid.push_back(std::clamp(static_cast<double>(k) * grid_step, -2.0, 2.0));
  }
  grid.insert(grid.end(), {-1.0, 0.0, 1.0});
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> values(grid.size());
  double best = INFINITY;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    values[i] = conditional_phi_risk(grid[i], eta, cm);
    best = std::min(best, values[i]);
  }
  const double tie = 1e-12 * std::max(1.0, best);
  std::vector<double> out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (values[i] <= best + tie) out.push_back(grid[i]);
  }
  return out;
}

}  // namespace rejlasso
