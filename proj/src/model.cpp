#include "rejlasso/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rejlasso/text_io.hpp"

namespace rejlasso {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

bool same_point(std::span<const double> a, std::span<const double> b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

void validate(const BaseFunction& f) {
  std::visit(overloaded{
                 [](const SignStump& s) {
                   if (s.polarity != 1 && s.polarity != -1) throw std::invalid_argument("stump polarity must be +1 or -1");
                   if (!std::isfinite(s.threshold)) throw std::invalid_argument("stump threshold must be finite");
                 },
                 [](const ClippedAffine& c) {
                   if (!(c.clip > 0.0) || !std::isfinite(c.clip)) throw std::invalid_argument("affine clip must be positive");
                   if (c.weights.empty()) throw std::invalid_argument("affine feature needs weights");
                 },
                 [](const PointIndicator& p) {
                   if (p.point.empty()) throw std::invalid_argument("indicator point is empty");
                 },
                 [](const Tabulated& t) {
                   if (t.points.size() != t.values.size()) throw std::invalid_argument("tabulated points/values length mismatch");
                   for (std::size_t i = 0; i < t.points.size(); ++i) {
                     for (std::size_t k = 0; k < i; ++k) {
                       if (same_point(t.points[i], t.points[k])) throw std::invalid_argument("tabulated points must be distinct");
                     }
                   }
                 },
             },
             f);
}

std::string point_list(const std::vector<FeatureVector>& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i) out += " ; ";
    out += join_doubles(pts[i]);
  }
  return out;
}

std::vector<FeatureVector> parse_point_list(std::string_view s) {
  std::vector<FeatureVector> pts;
  if (trim(s).empty()) return pts;
  for (const auto& part : split(s, ';')) pts.push_back(parse_doubles(part));
  return pts;
}

}  // namespace

double evaluate(const BaseFunction& f, std::span<const double> x) {
  return std::visit(
      overloaded{
          [&](const SignStump& s) {
            if (s.feature >= x.size()) throw std::invalid_argument("stump feature index out of range");
            return x[s.feature] >= s.threshold ? double(s.polarity) : -double(s.polarity);
          },
          [&](const ClippedAffine& c) {
            if (c.weights.size() != x.size()) throw std::invalid_argument("affine feature dimension mismatch");
            double v = c.bias;
            for (std::size_t k = 0; k < x.size(); ++k) v += c.weights[k] * x[k];
            return std::clamp(v, -c.clip, c.clip);
          },
          [&](const PointIndicator& p) { return same_point(p.point, x) ? 1.0 : 0.0; },
          [&](const Tabulated& t) {
            for (std::size_t i = 0; i < t.points.size(); ++i) {
              if (same_point(t.points[i], x)) return t.values[i];
            }
            return 0.0;
          },
      },
      f);
}

double sup_bound(const BaseFunction& f) {
  return std::visit(overloaded{
                        [](const SignStump&) { return 1.0; },
                        [](const ClippedAffine& c) { return c.clip; },
                        [](const PointIndicator&) { return 1.0; },
                        [](const Tabulated& t) {
                          double m = 0.0;
                          for (double v : t.values) m = std::max(m, std::abs(v));
                          return m;
                        },
                    },
                    f);
}

std::string family_name(const BaseFunction& f) {
  return std::visit(overloaded{
                        [](const SignStump&) { return std::string("sign_stump"); },
                        [](const ClippedAffine&) { return std::string("clipped_affine"); },
                        [](const PointIndicator&) { return std::string("indicator"); },
                        [](const Tabulated&) { return std::string("tabulated"); },
                    },
                    f);
}

bool operator==(const SignStump& a, const SignStump& b) {
  return a.feature == b.feature && a.threshold == b.threshold && a.polarity == b.polarity;
}
bool operator==(const ClippedAffine& a, const ClippedAffine& b) {
  return a.weights == b.weights && a.bias == b.bias && a.clip == b.clip;
}
bool operator==(const PointIndicator& a, const PointIndicator& b) { return a.point == b.point; }
bool operator==(const Tabulated& a, const Tabulated& b) { return a.points == b.points && a.values == b.values; }

Dictionary::Dictionary(std::vector<BaseFunction> functions, double c_f) : functions_(std::move(functions)), c_f_(c_f) {
  if (functions_.empty()) throw std::invalid_argument("dictionary must contain at least one function");
  if (!(c_f > 0.0) || !std::isfinite(c_f)) throw std::invalid_argument("dictionary bound C_F must be positive and finite");
  for (std::size_t j = 0; j < functions_.size(); ++j) {
    validate(functions_[j]);
    if (sup_bound(functions_[j]) > c_f_) {
      throw std::invalid_argument("function " + std::to_string(j) + " (" + family_name(functions_[j]) +
                                  ") exceeds the declared bound C_F=" + format_double(c_f_));
    }
  }
}

double Dictionary::value(std::size_t j, std::span<const double> x) const { return evaluate(functions_.at(j), x); }

std::vector<double> Dictionary::values(std::span<const double> x) const {
  std::vector<double> out(functions_.size());
  for (std::size_t j = 0; j < functions_.size(); ++j) out[j] = evaluate(functions_[j], x);
  return out;
}

void Dictionary::check_bound_on(std::span<const FeatureVector> points) const {
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (std::size_t j = 0; j < functions_.size(); ++j) {
      if (std::abs(evaluate(functions_[j], points[k])) > c_f_) {
        throw std::invalid_argument("function " + std::to_string(j) + " exceeds C_F at support point " +
                                    std::to_string(k));
      }
    }
  }
}

KeyValueDoc Dictionary::to_doc() const {
  KeyValueDoc doc;
  doc.set("c_f", c_f_);
  doc.set("functions", static_cast<std::int64_t>(functions_.size()));
  for (std::size_t j = 0; j < functions_.size(); ++j) {
    const std::string p = "function." + std::to_string(j) + ".";
    doc.set(p + "family", family_name(functions_[j]));
    std::visit(overloaded{
                   [&](const SignStump& s) {
                     doc.set(p + "feature", static_cast<std::int64_t>(s.feature));
                     doc.set(p + "threshold", s.threshold);
                     doc.set(p + "polarity", static_cast<std::int64_t>(s.polarity));
                   },
                   [&](const ClippedAffine& c) {
                     doc.set(p + "weights", join_doubles(c.weights));
                     doc.set(p + "bias", c.bias);
                     doc.set(p + "clip", c.clip);
                   },
                   [&](const PointIndicator& pi) { doc.set(p + "point", join_doubles(pi.point)); },
                   [&](const Tabulated& t) {
                     doc.set(p + "points", point_list(t.points));
                     doc.set(p + "values", join_doubles(t.values));
                   },
               },
               functions_[j]);
  }
  return doc;
}

Dictionary Dictionary::from_doc(const KeyValueDoc& doc) {
  const double c_f = doc.get_double("c_f");
  const auto m = doc.get_int("functions");
  if (m < 1) throw ConfigError("dictionary needs functions >= 1");
  std::vector<BaseFunction> fs;
  fs.reserve(static_cast<std::size_t>(m));
  for (std::int64_t j = 0; j < m; ++j) {
    const std::string p = "function." + std::to_string(j) + ".";
    const std::string& fam = doc.get(p + "family");
    if (fam == "sign_stump") {
      const auto feature = doc.get_int(p + "feature");
      if (feature < 0) throw ConfigError(p + "feature must be nonnegative");
      fs.push_back(SignStump{static_cast<std::size_t>(feature), doc.get_double(p + "threshold"),
                             static_cast<int>(doc.get_int(p + "polarity"))});
    } else if (fam == "clipped_affine") {
      fs.push_back(ClippedAffine{parse_doubles(doc.get(p + "weights")), doc.get_double(p + "bias"),
                                 doc.get_double(p + "clip")});
    } else if (fam == "indicator") {
      fs.push_back(PointIndicator{parse_doubles(doc.get(p + "point"))});
    } else if (fam == "tabulated") {
      fs.push_back(Tabulated{parse_point_list(doc.get(p + "points")), parse_doubles(doc.get(p + "values"))});
    } else {
      throw ConfigError("unknown dictionary family '" + fam + "'");
    }
  }
  return Dictionary(std::move(fs), c_f);
}

bool operator==(const Dictionary& a, const Dictionary& b) { return a.c_f_ == b.c_f_ && a.functions_ == b.functions_; }

Dictionary indicator_dictionary(std::span<const FeatureVector> points) {
  std::vector<BaseFunction> fs;
  for (const auto& p : points) fs.push_back(PointIndicator{p});
  return Dictionary(std::move(fs), 1.0);
}

Dictionary stump_dictionary(std::size_t feature, std::span<const double> thresholds, int polarity) {
  std::vector<BaseFunction> fs;
  for (double t : thresholds) fs.push_back(SignStump{feature, t, polarity});
  return Dictionary(std::move(fs), 1.0);
}

std::string to_string(RejectDecision d) {
  switch (d) {
    case RejectDecision::minus: return "-1";
    case RejectDecision::plus: return "+1";
    case RejectDecision::reject: return "R";
  }
  return "?";
}

double evaluate(const Dictionary& dict, const Coefficients& lam, std::span<const double> x) {
  if (lam.size() != dict.size()) {
    throw std::invalid_argument("coefficient length " + std::to_string(lam.size()) + " != dictionary size " +
                                std::to_string(dict.size()));
  }
  double s = 0.0;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    if (lam[j] != 0.0) s += lam[j] * dict.value(j, x);
  }
  return s;
}

RejectDecision classify(double score, const CostModel& cm) noexcept {
  if (score > cm.tau()) return RejectDecision::plus;
  if (score < -cm.tau()) return RejectDecision::minus;
  return RejectDecision::reject;
}

double l1_norm(const Coefficients& lam) noexcept {
  double s = 0.0;
  for (double v : lam.values) s += std::abs(v);
  return s;
}

double l1_distance(const Coefficients& a, const Coefficients& b) {
  if (a.size() != b.size()) throw std::invalid_argument("coefficient length mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += std::abs(a[j] - b[j]);
  return s;
}

std::size_t l0_count(const Coefficients& lam, double zero_tol) {
  if (!(zero_tol >= 0.0)) throw std::invalid_argument("zero tolerance must be nonnegative");
  return static_cast<std::size_t>(
      std::count_if(lam.values.begin(), lam.values.end(), [&](double v) { return std::abs(v) > zero_tol; }));
}

std::vector<std::size_t> support(const Coefficients& lam, double zero_tol) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < lam.size(); ++j) {
    if (std::abs(lam[j]) > zero_tol) out.push_back(j);
  }
  return out;
}

}  // namespace rejlasso
