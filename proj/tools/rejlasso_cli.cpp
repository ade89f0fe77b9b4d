// rejlasso: fit, predict, tune, verify and report for l1-penalized reject-option
// classification.
//
// Exit status: 0 on success, 1 when a verification assertion fails or a run errors,
// 2 on a usage error (bad flags, unreadable or malformed input).

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rejlasso/config.hpp"
#include "rejlasso/experiments.hpp"
#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"
#include "rejlasso/risk.hpp"
#include "rejlasso/solver.hpp"
#include "rejlasso/text_io.hpp"
#include "rejlasso/theory.hpp"

using namespace rejlasso;

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string scenario = "S1";
  std::optional<std::size_t> replicates;
  std::string data;
  std::string model;
  std::string dictionary;
  std::string records;
  bool no_labels = false;
  bool timings = false;
  unsigned threads = 0;
};

// Settings shared by fit and tune.
struct FitSettings {
  double d = 0.2;
  double tau = 0.2;
  std::string rn_mode = "cv";
  double r_n = 0.0;
  std::optional<double> c_lambda;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  double tol = 1e-8;
};

FitSettings load_fit_settings(const Options& o) {
  FitSettings s;
  if (!o.config.empty()) {
    const auto doc = KeyValueDoc::load(o.config);
    static const std::vector<std::string> known{"d", "tau", "rn_mode", "r_n", "c_lambda", "folds", "seed", "tol"};
    for (const auto& [k, v] : doc.entries()) {
      if (std::find(known.begin(), known.end(), k) == known.end()) throw ConfigError("unknown fit key '" + k + "'");
    }
    s.d = doc.get_double_or("d", s.d);
    s.tau = doc.get_double_or("tau", s.tau);
    s.rn_mode = doc.get_or("rn_mode", doc.has("r_n") ? "fixed" : s.rn_mode);
    s.r_n = doc.get_double_or("r_n", s.r_n);
    if (doc.has("c_lambda")) s.c_lambda = doc.get_double("c_lambda");
    const auto folds = doc.get_int_or("folds", std::int64_t(s.folds));
    if (folds < 2) throw ConfigError("folds must be >= 2");
    s.folds = static_cast<std::size_t>(folds);
    s.seed = doc.get_u64_or("seed", s.seed);
    s.tol = doc.get_double_or("tol", s.tol);
  }
  if (o.seed) s.seed = *o.seed;
  if (s.rn_mode != "cv" && s.rn_mode != "fixed") throw ConfigError("fit rn_mode must be cv or fixed");
  if (s.rn_mode == "fixed" && !(s.r_n > 0.0)) throw ConfigError("fixed rn_mode needs r_n > 0");
  return s;
}

// Sign stumps at midpoints between consecutive distinct values, at most 15 per feature.
Dictionary default_dictionary(const std::vector<FeatureVector>& x) {
  std::vector<BaseFunction> fs;
  for (std::size_t f = 0; f < x.front().size(); ++f) {
    std::vector<double> v;
    for (const auto& row : x) v.push_back(row[f]);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    std::vector<double> mids;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) mids.push_back(0.5 * (v[i] + v[i + 1]));
    const std::size_t keep = std::min<std::size_t>(15, mids.size());
    for (std::size_t k = 0; k < keep; ++k) {
      const std::size_t idx = keep == mids.size() ? k : k * (mids.size() - 1) / (keep - 1);
      fs.push_back(SignStump{f, mids[idx], 1});
    }
  }
  if (fs.empty()) throw UsageError("every feature is constant; supply --dictionary");
  return Dictionary(std::move(fs), 1.0);
}

Dataset load_dataset(const std::string& path) {
  if (path.empty()) throw UsageError("--data is required");
  return Dataset::load_csv(path);
}

Dictionary load_or_default_dictionary(const Options& o, const Dataset& data) {
  if (!o.dictionary.empty()) return Dictionary::from_doc(KeyValueDoc::load(o.dictionary));
  return default_dictionary(data.x);
}

std::filesystem::path prepare_out(const std::string& out) {
  std::error_code ec;
  std::filesystem::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create '" + out + "': " + ec.message());
  return out;
}

int cmd_fit(const Options& o) {
  const auto s = load_fit_settings(o);
  const CostModel cm(s.d, s.tau);
  const auto data = load_dataset(o.data);
  const auto dict = load_or_default_dictionary(o, data);
  double r_n = s.r_n;
  if (s.rn_mode == "cv") {
    r_n = cross_validate_rn(data, dict, cm, default_cv_grid(cm, dict.c_f()), s.folds, s.seed, s.c_lambda).r_n;
  }
  SolveConfig sc;
  sc.r_n = r_n;
  sc.c_lambda = s.c_lambda;
  sc.tol = s.tol;
  sc.seed = s.seed;
  const auto fit = solve(data, dict, cm, sc);

  KeyValueDoc model = dict.to_doc();
  model.set("model.d", cm.d());
  model.set("model.tau", cm.tau());
  model.set("model.r_n", r_n);
  if (s.c_lambda) model.set("model.c_lambda", *s.c_lambda);
  model.set("model.lambda", join_doubles(fit.lam_hat.values));
  model.set("model.objective", fit.objective);
  model.set("model.gap_bound", fit.gap_bound);

  std::string decisions = "score,decision,label\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    const double score = evaluate(dict, fit.lam_hat, data.x[i]);
    decisions += format_double(score) + ',' + to_string(classify(score, cm)) + ',' + std::to_string(data.y[i]) + '\n';
  }
  std::cerr << "r_n = " << format_double(r_n) << ", objective = " << format_double(fit.objective)
            << ", certified gap = " << format_double(fit.gap_bound) << (fit.converged ? "" : " (NOT converged)")
            << ", nonzeros = " << l0_count(fit.lam_hat, kReportZeroTol) << "\n";
  if (o.out.empty()) {
    std::cout << model.to_text();
  } else {
    const auto dir = prepare_out(o.out);
    write_file((dir / "model.txt").string(), model.to_text());
    write_file((dir / "decisions.csv").string(), decisions);
  }
  return fit.converged ? 0 : 1;
}

int cmd_predict(const Options& o) {
  if (o.model.empty()) throw UsageError("--model is required");
  if (o.data.empty()) throw UsageError("--data is required");
  const auto doc = KeyValueDoc::load(o.model);
  const auto dict = Dictionary::from_doc(doc);
  const CostModel cm(doc.get_double("model.d"), doc.get_double("model.tau"));
  const Coefficients lam(parse_doubles(doc.get("model.lambda")));
  if (lam.size() != dict.size()) throw ConfigError("model.lambda length does not match the dictionary");

  std::vector<FeatureVector> x;
  std::vector<int> y;
  if (o.no_labels) {
    bool first = true;
    for (const auto& line : split(read_file(o.data), '\n')) {
      if (line.empty()) continue;
      const auto toks = split(line, ',');
      if (first && !try_parse_double(toks.front())) {
        first = false;
        continue;
      }
      first = false;
      x.push_back(parse_doubles(line, ','));
    }
    if (x.empty()) throw UsageError("no rows in " + o.data);
  } else {
    auto data = Dataset::load_csv(o.data);
    x = std::move(data.x);
    y = std::move(data.y);
  }
  std::string out = "score,decision\n";
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double score = evaluate(dict, lam, x[i]);
    out += format_double(score) + ',' + to_string(classify(score, cm)) + '\n';
    if (!y.empty()) loss += reject_loss(y[i] * score, cm);
  }
  if (!y.empty()) std::cerr << "empirical reject risk = " << format_double(loss / double(x.size())) << "\n";
  if (o.out.empty()) {
    std::cout << out;
  } else {
    write_file((prepare_out(o.out) / "predictions.csv").string(), out);
  }
  return 0;
}

int cmd_tune(const Options& o) {
  const auto s = load_fit_settings(o);
  const CostModel cm(s.d, s.tau);
  const auto data = load_dataset(o.data);
  const auto dict = load_or_default_dictionary(o, data);
  const auto cv = cross_validate_rn(data, dict, cm, default_cv_grid(cm, dict.c_f()), s.folds, s.seed, s.c_lambda);
  const auto rec = recommended_rn(data.n(), dict.size(), cm, dict.c_f(), 0.05);
  std::string table = "r_n,cv_reject_risk\n";
  for (std::size_t i = 0; i < cv.grid.size(); ++i) table += format_double(cv.grid[i]) + ',' + format_double(cv.cv_risk[i]) + '\n';
  std::cout << "cv r_n = " << format_double(cv.r_n) << "\n"
            << "bound-based r_n (delta = 0.05) = " << format_double(rec.rn_recommended) << "\n";
  if (!o.out.empty()) write_file((prepare_out(o.out) / "cv.csv").string(), table);
  return 0;
}

ScenarioConfig scenario_config(const Options& o, const std::string& name) {
  ScenarioConfig cfg = scenario_by_name(name);
  if (!o.config.empty()) {
    auto doc = KeyValueDoc::load(o.config);
    if (!doc.has("name")) doc.set("name", name);
    cfg = ScenarioConfig::from_doc(doc);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.replicates) cfg.replicates = *o.replicates;
  cfg.validate();
  return cfg;
}

bool verify_one(const Options& o, const std::string& name) {
  const auto cfg = scenario_config(o, name);
  const std::string out = o.out.empty() ? "" : (std::filesystem::path(o.out) / cfg.name).string();
  if (name == "C1") {
    const auto c = run_concentration_experiment(cfg, o.threads);
    const bool ok = c.in_range && c.mean_ok && c.tail.all_ok;
    std::cout << cfg.name << ": n=" << c.n << " replicates=" << c.samples.size()
              << " mean(rhat_lb)=" << format_double(c.tail.mean) << " mean_bound=" << format_double(c.mean_bound)
              << " range=[" << format_double(c.tail.min) << ',' << format_double(c.tail.max) << "] cap="
              << format_double(c.cap) << " tail_ok=" << c.tail.all_ok << (ok ? "  PASS" : "  FAIL") << "\n";
    if (!out.empty()) {
      std::vector<ExperimentRecord> recs;
      for (std::size_t r = 0; r < c.samples.size(); ++r) {
        ExperimentRecord rec;
        rec.scenario = cfg.name;
        rec.n = c.n;
        rec.replicate = r;
        rec.r_n = c.r_n;
        rec.rhat_lb = c.samples[r];
        rec.event = c.r_n > c.samples[r];
        recs.push_back(rec);
      }
      emit_report(recs, to_json(c), tail_series(c), out, o.timings);
    }
    return ok;
  }
  const auto e = run_oracle_experiment(cfg, o.threads);
  bool ok = true;
  const double need = 1.0 - cfg.delta - 0.05;
  for (const auto& s : e.summaries) {
    bool pass = s.failed == 0;
    if (s.coherence.condition2_holds && s.frac_event > 0.0) {
      pass = pass && s.frac_phi_given_event >= need && s.frac_reject_given_event >= need;
    }
    ok = ok && pass;
    std::cout << cfg.name << ": n=" << s.n << " r_n=" << format_double(s.r_n) << " replicates=" << s.replicates
              << " failed=" << s.failed << " event=" << format_double(s.frac_event)
              << " oracle_phi=" << format_double(s.frac_phi) << " oracle_reject=" << format_double(s.frac_reject)
              << " oracle_phi|event=" << format_double(s.frac_phi_given_event)
              << " oracle_reject|event=" << format_double(s.frac_reject_given_event)
              << " median_lhs=" << format_double(s.median_lhs_phi) << " |I*|=" << s.support.size()
              << " coherent=" << s.coherence.condition2_holds << (pass ? "  PASS" : "  FAIL") << "\n";
  }
  if (!out.empty()) emit_report(e.records, to_json(e), rate_series(e), out, o.timings);
  return ok;
}

int cmd_verify(const Options& o) {
  std::vector<std::string> names;
  if (o.scenario == "all") {
    names = scenario_names();
  } else if (o.scenario == "S4") {
    names = {"S4-alpha0", "S4-alpha1", "S4-alphainf"};
  } else {
    names = {o.scenario};
  }
  bool ok = true;
  for (const auto& n : names) ok = verify_one(o, n) && ok;
  return ok ? 0 : 1;
}

int cmd_report(const Options& o) {
  std::string path = o.records;
  if (path.empty() && !o.out.empty()) path = (std::filesystem::path(o.out) / "records.csv").string();
  if (path.empty()) throw UsageError("--records (or --out containing records.csv) is required");
  const auto recs = parse_records_csv(read_file(path));
  if (recs.empty()) throw UsageError("no records in " + path);
  std::map<std::pair<std::string, std::size_t>, std::vector<ExperimentRecord>> groups;
  for (const auto& r : recs) groups[{r.scenario, r.n}].push_back(r);
  std::cout << "scenario,n,replicates,failed,r_n,frac_event,frac_oracle_phi,frac_oracle_reject,frac_oracle_phi_given_event,"
               "frac_oracle_reject_given_event,median_lhs_phi,max_rhat_lb\n";
  for (const auto& [key, group] : groups) {
    const auto s = summarize(group, key.second);
    std::cout << key.first << ',' << s.n << ',' << s.replicates << ',' << s.failed << ',' << format_double(s.r_n) << ','
              << format_double(s.frac_event) << ',' << format_double(s.frac_phi) << ',' << format_double(s.frac_reject)
              << ',' << format_double(s.frac_phi_given_event) << ',' << format_double(s.frac_reject_given_event) << ','
              << format_double(s.median_lhs_phi) << ',' << format_double(s.max_rhat_lb) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"l1-penalized classification with a reject option"};
  app.require_subcommand(1);
  Options o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "random seed (u64)");
    sub->add_option("--out", o.out, "output directory");
  };

  auto* fit = app.add_subcommand("fit", "fit coefficients on a labeled CSV (features..., label in {-1,1})");
  add_common(fit);
  fit->add_option("--data", o.data, "training CSV")->required()->check(CLI::ExistingFile);
  fit->add_option("--dictionary", o.dictionary, "dictionary file (default: stumps per feature)")
      ->check(CLI::ExistingFile);

  auto* predict = app.add_subcommand("predict", "score and classify rows with a fitted model (-1, R, +1)");
  add_common(predict);
  predict->add_option("--model", o.model, "model file written by fit")->required()->check(CLI::ExistingFile);
  predict->add_option("--data", o.data, "CSV to classify")->required()->check(CLI::ExistingFile);
  predict->add_flag("--no-labels", o.no_labels, "the CSV has no label column");

  auto* tune = app.add_subcommand("tune", "cross-validate r_n on the reject loss");
  add_common(tune);
  tune->add_option("--data", o.data, "training CSV")->required()->check(CLI::ExistingFile);
  tune->add_option("--dictionary", o.dictionary, "dictionary file")->check(CLI::ExistingFile);

  auto* verify = app.add_subcommand("verify", "run a scenario suite and check the oracle inequalities");
  add_common(verify);
  verify->add_option("--scenario", o.scenario, "S1, S2, S3, S4, S4-alpha0, S4-alpha1, S4-alphainf, C1 or all");
  verify->add_option("--replicates", o.replicates, "replicate count")->check(CLI::PositiveNumber);
  verify->add_option("--threads", o.threads, "worker threads (0 = all cores)");
  verify->add_flag("--timings", o.timings, "add per-replicate timings to records.csv");

  auto* report = app.add_subcommand("report", "summarize a records.csv");
  report->add_option("--records", o.records, "records.csv path")->check(CLI::ExistingFile);
  report->add_option("--out", o.out, "directory containing records.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*fit) return cmd_fit(o);
    if (*predict) return cmd_predict(o);
    if (*tune) return cmd_tune(o);
    if (*verify) return cmd_verify(o);
    if (*report) return cmd_report(o);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
