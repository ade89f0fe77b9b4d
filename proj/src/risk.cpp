#include "rejlasso/risk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rejlasso/text_io.hpp"

namespace rejlasso {

namespace {

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = trim(text.substr(start, end == std::string_view::npos ? end : end - start));
    if (!line.empty()) out.push_back(line);
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
  return out;
}

// Rows of numbers; a leading row whose first token is non-numeric is dropped as a header.
std::vector<std::vector<double>> numeric_rows(std::string_view text) {
  auto lines = lines_of(text);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto toks = split(lines[i], ',');
    if (i == 0 && !try_parse_double(toks.front())) continue;
    std::vector<double> row;
    row.reserve(toks.size());
    for (const auto& t : toks) {
      auto v = try_parse_double(t);
      if (!v) throw std::invalid_argument("line " + std::to_string(i + 1) + ": non-numeric field '" + t + "'");
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double min3(double a, double b, double c) { return std::min(a, std::min(b, c)); }

}  // namespace

void Dataset::validate() const {
  if (y.empty()) throw std::invalid_argument("dataset is empty");
  if (x.size() != y.size()) throw std::invalid_argument("dataset feature/label count mismatch");
  const auto d = x.front().size();
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] != 1 && y[i] != -1) throw std::invalid_argument("label must be -1 or +1 (row " + std::to_string(i) + ")");
    if (x[i].size() != d) throw std::invalid_argument("ragged feature rows (row " + std::to_string(i) + ")");
  }
}

Dataset Dataset::subset(std::span<const std::size_t> rows) const {
  Dataset out;
  out.x.reserve(rows.size());
  out.y.reserve(rows.size());
  for (auto r : rows) {
    out.x.push_back(x.at(r));
    out.y.push_back(y.at(r));
  }
  return out;
}

Dataset Dataset::parse_csv(std::string_view text) {
  Dataset ds;
  for (auto& row : numeric_rows(text)) {
    if (row.size() < 2) throw std::invalid_argument("dataset rows need at least one feature and a label");
    const double label = row.back();
    if (label != 1.0 && label != -1.0) throw std::invalid_argument("label must be -1 or +1");
    ds.y.push_back(static_cast<int>(label));
    row.pop_back();
    ds.x.push_back(std::move(row));
  }
  ds.validate();
  return ds;
}

Dataset Dataset::load_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string Dataset::to_csv() const {
  std::string out;
  for (std::size_t i = 0; i < y.size(); ++i) {
    out += join_doubles(x[i], ',');
    out += ',';
    out += y[i] > 0 ? "1" : "-1";
    out += '\n';
  }
  return out;
}

std::string Dataset::digest() const { return hex64(fnv1a64(to_csv())); }

void FiniteDistribution::validate() const {
  if (points.empty()) throw std::invalid_argument("distribution has no support points");
  if (p.size() != points.size() || eta.size() != points.size()) {
    throw std::invalid_argument("distribution column lengths differ");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    if (!(p[k] > 0.0)) throw std::invalid_argument("support masses must be positive");
    if (!(eta[k] >= 0.0 && eta[k] <= 1.0)) throw std::invalid_argument("eta outside [0, 1]");
    if (points[k].size() != points.front().size()) throw std::invalid_argument("support points differ in dimension");
    for (std::size_t j = 0; j < k; ++j) {
      if (points[j] == points[k]) throw std::invalid_argument("support points must be distinct");
    }
    total += p[k];
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("support masses do not sum to 1");
}

FiniteDistribution FiniteDistribution::parse_csv(std::string_view text) {
  FiniteDistribution dist;
  for (auto& row : numeric_rows(text)) {
    if (row.size() < 3) throw std::invalid_argument("distribution rows need features, p and eta");
    dist.eta.push_back(row.back());
    row.pop_back();
    dist.p.push_back(row.back());
    row.pop_back();
    dist.points.push_back(std::move(row));
  }
  dist.validate();
  return dist;
}

FiniteDistribution FiniteDistribution::load_csv(const std::string& path) { return parse_csv(read_file(path)); }

std::string FiniteDistribution::to_csv() const {
  std::string out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    out += join_doubles(points[k], ',');
    out += ',' + format_double(p[k]) + ',' + format_double(eta[k]) + '\n';
  }
  return out;
}

std::vector<double> scores_on_support(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam) {
  std::vector<double> s(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) s[k] = evaluate(dict, lam, dist.points[k]);
  return s;
}

std::vector<double> bayes_scores(const FiniteDistribution& dist, const CostModel& cm) {
  std::vector<double> s(dist.size());
  for (std::size_t k = 0; k < dist.size(); ++k) s[k] = bayes_score(dist.eta[k], cm);
  return s;
}

double empirical_phi_risk(const Dataset& data, const Dictionary& dict, const Coefficients& lam, const CostModel& cm) {
  if (data.n() == 0) throw std::invalid_argument("empty dataset");
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) s += phi_d(data.y[i] * evaluate(dict, lam, data.x[i]), cm);
  return s / static_cast<double>(data.n());
}

double empirical_reject_risk(const Dataset& data, const Dictionary& dict, const Coefficients& lam,
                             const CostModel& cm) {
  if (data.n() == 0) throw std::invalid_argument("empty dataset");
  double s = 0.0;
  for (std::size_t i = 0; i < data.n(); ++i) s += reject_loss(data.y[i] * evaluate(dict, lam, data.x[i]), cm);
  return s / static_cast<double>(data.n());
}

double population_phi_risk(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm) {
  if (scores.size() != dist.size()) throw std::invalid_argument("score count != support size");
  double s = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) s += dist.p[k] * conditional_phi_risk(scores[k], dist.eta[k], cm);
  return s;
}

double population_reject_risk(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm) {
  if (scores.size() != dist.size()) throw std::invalid_argument("score count != support size");
  double s = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double eta = dist.eta[k];
    s += dist.p[k] * (eta * reject_loss(scores[k], cm) + (1.0 - eta) * reject_loss(-scores[k], cm));
  }
  return s;
}

double population_phi_risk(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                           const CostModel& cm) {
  return population_phi_risk(dist, scores_on_support(dist, dict, lam), cm);
}

double population_reject_risk(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                              const CostModel& cm) {
  return population_reject_risk(dist, scores_on_support(dist, dict, lam), cm);
}

double bayes_reject_risk(const FiniteDistribution& dist, const CostModel& cm) {
  double s = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) s += dist.p[k] * min3(dist.eta[k], 1.0 - dist.eta[k], cm.d());
  return s;
}

double bayes_phi_risk(const FiniteDistribution& dist, const CostModel& cm) {
  return population_phi_risk(dist, bayes_scores(dist, cm), cm);
}

double minimal_phi_risk_by_kinks(const FiniteDistribution& dist, const CostModel& cm) {
  double s = 0.0;
  for (std::size_t k = 0; k < dist.size(); ++k) {
    const double eta = dist.eta[k];
    s += dist.p[k] * min3(conditional_phi_risk(-1.0, eta, cm), conditional_phi_risk(0.0, eta, cm),
                          conditional_phi_risk(1.0, eta, cm));
  }
  return s;
}

RiskReport excess_risks(const FiniteDistribution& dist, std::span<const double> scores, const CostModel& cm) {
  RiskReport r;
  r.phi_risk = population_phi_risk(dist, scores, cm);
  r.reject_risk = population_reject_risk(dist, scores, cm);
  r.bayes_phi_risk = bayes_phi_risk(dist, cm);
  r.bayes_reject_risk = bayes_reject_risk(dist, cm);
  auto clamp_excess = [](double v, const char* what) {
    if (v < -kExcessTolerance) throw std::logic_error(std::string("negative excess ") + what + " risk");
    return std::max(v, 0.0);
  };
  r.excess_phi = clamp_excess(r.phi_risk - r.bayes_phi_risk, "surrogate");
  r.excess_reject = clamp_excess(r.reject_risk - r.bayes_reject_risk, "reject");
  if (r.excess_reject > r.excess_phi + kExcessTolerance) {
    throw std::logic_error("reject excess risk exceeds surrogate excess risk");
  }
  return r;
}

RiskReport excess_risks(const FiniteDistribution& dist, const Dictionary& dict, const Coefficients& lam,
                        const CostModel& cm) {
  return excess_risks(dist, scores_on_support(dist, dict, lam), cm);
}

}  // namespace rejlasso
