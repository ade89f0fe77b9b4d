#ifndef REJLASSO_EXPERIMENTS_HPP
#define REJLASSO_EXPERIMENTS_HPP

#include <cstdint>
#include <json.hpp>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rejlasso/config.hpp"
#include "rejlasso/losses.hpp"
#include "rejlasso/model.hpp"
#include "rejlasso/risk.hpp"
#include "rejlasso/theory.hpp"

namespace rejlasso {

std::uint64_t splitmix64(std::uint64_t& state);
/// Independent stream seed for (seed, stream), stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// mt19937_64 with platform-independent draws (the std distributions are not).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform on {0, ..., n - 1}, rejection sampled.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform01() < p; }

 private:
  std::mt19937_64 engine_;
};

enum class RnMode { recommended, cross_validated, fixed };

std::string to_string(RnMode m);
RnMode parse_rn_mode(const std::string& s);

struct ScenarioConfig {
  std::string name = "custom";
  // Distribution on the 1-d support {0, 1, ..., support_size - 1}.
  std::size_t support_size = 8;
  /// sparse_realizable | separated | uniform_grid | half | margin
  std::string eta_profile = "sparse_realizable";
  /// Points carrying a nonzero Bayes decision (sparse_realizable).
  std::size_t active = 2;
  double eta_high = 0.9;
  double margin_a = 1.0;
  double margin_alpha = 0.0;
  // Dictionary: indicator (one per support point) | stump (thresholds between points).
  std::string dictionary = "indicator";
  std::size_t m = 8;
  double c_f = 1.0;
  double d = 0.2;
  double tau = 0.2;
  double c_lambda = 4.0;
  std::vector<std::size_t> sample_sizes{400};
  std::size_t replicates = 200;
  double delta = 0.05;
  RnMode rn_mode = RnMode::recommended;
  double rn_fixed = 0.1;
  std::size_t k_max = 3;
  std::size_t folds = 5;
  std::size_t rhat_candidates = 200;
  std::uint64_t seed = 1;

  void validate() const;
  CostModel cost_model() const { return CostModel(d, tau); }
  KeyValueDoc to_doc() const;
  /// Missing keys keep their defaults; unknown keys are errors.
  static ScenarioConfig from_doc(const KeyValueDoc& doc);
};

/// S1 orthogonal indicators, realizable sparse f0; S2 correlated stumps; S3 eta = 1/2;
/// S4-alpha0, S4-alpha1, S4-alphainf margin scan; C1 concentration (n = 200).
ScenarioConfig scenario_by_name(const std::string& name);
std::vector<std::string> scenario_names();

/// Throws std::invalid_argument if the profile cannot meet the requested (A, alpha).
FiniteDistribution synth_distribution(const ScenarioConfig& cfg);
Dictionary build_dictionary(const ScenarioConfig& cfg, const FiniteDistribution& dist);

/// n i.i.d. draws: support point by p, then label +1 with probability eta.
Dataset sample_dataset(const FiniteDistribution& dist, std::size_t n, std::uint64_t seed);

/// 25 log-spaced points on [1e-3 * 2 C_phi C_F, 2 C_phi C_F].
std::vector<double> default_cv_grid(const CostModel& cm, double c_f);

struct CvResult {
  double r_n = 0.0;
  std::vector<double> grid;
  std::vector<double> cv_risk;
};

/// k-fold CV of held-out reject-loss risk. Ties go to the larger r_n.
CvResult cross_validate_rn(const Dataset& data, const Dictionary& dict, const CostModel& cm,
                           const std::vector<double>& grid, std::size_t folds, std::uint64_t seed,
                           std::optional<double> c_lambda = std::nullopt);

struct ExperimentRecord {
  std::string scenario;
  std::size_t n = 0;
  std::size_t replicate = 0;
  std::uint64_t seed = 0;
  std::string digest;
  double r_n = 0.0;
  double rhat_lb = 0.0;
  bool event = false;
  std::vector<double> lam_hat;
  std::vector<double> lam_star;
  double excess_phi = 0.0;
  double excess_reject = 0.0;
  double lhs_phi = 0.0;
  double lhs_reject = 0.0;
  double rhs = 0.0;
  bool holds_phi = false;
  bool holds_reject = false;
  double objective = 0.0;
  double gap_bound = 0.0;
  bool converged = false;
  /// Empty unless the replicate failed.
  std::string error;
  double seconds = 0.0;

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

struct ExperimentSummary {
  std::size_t n = 0;
  std::size_t replicates = 0;
  std::size_t failed = 0;
  double r_n = 0.0;
  double frac_event = 0.0;
  double frac_phi = 0.0;
  double frac_reject = 0.0;
  double frac_phi_given_event = 0.0;
  double frac_reject_given_event = 0.0;
  double median_lhs_phi = 0.0;
  double median_lhs_reject = 0.0;
  double max_rhat_lb = 0.0;
  std::vector<double> lam_star;
  std::vector<std::size_t> support;
  double criterion = 0.0;
  CoherenceReport coherence;
  TuningReport tuning;
};

struct OracleExperiment {
  ScenarioConfig config;
  MarginParams margin;
  std::vector<ExperimentRecord> records;
  std::vector<ExperimentSummary> summaries;
};

ExperimentSummary summarize(const std::vector<ExperimentRecord>& records, std::size_t n);

/// Replicates run in parallel on derived streams; results do not depend on the thread
/// count.
OracleExperiment run_oracle_experiment(const ScenarioConfig& cfg, unsigned threads = 0);

struct ConcentrationResult {
  std::size_t n = 0;
  double r_n = 0.0;
  std::vector<double> samples;
  double mean_bound = 0.0;
  double cap = 0.0;
  bool in_range = true;
  bool mean_ok = true;
  TailReport tail;
};

ConcentrationResult run_concentration_experiment(const ScenarioConfig& cfg, unsigned threads = 0);

nlohmann::json to_json(const ExperimentSummary& s);
nlohmann::json to_json(const OracleExperiment& e);
nlohmann::json to_json(const ConcentrationResult& c);

struct PlotSeries {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Timings are left out unless asked for so that output is reproducible bit for bit.
std::string records_to_csv(const std::vector<ExperimentRecord>& records, bool with_timings = false);
std::vector<ExperimentRecord> parse_records_csv(std::string_view text);
std::string series_to_csv(const PlotSeries& s);

std::vector<PlotSeries> rate_series(const OracleExperiment& e);
std::vector<PlotSeries> tail_series(const ConcentrationResult& c);

/// Writes records.csv, summary.json and one <name>.csv per series into `out_dir`
/// (created if needed). Throws std::invalid_argument on empty records and
/// std::runtime_error when the directory cannot be written.
void emit_report(const std::vector<ExperimentRecord>& records, const nlohmann::json& summary,
                 const std::vector<PlotSeries>& series, const std::string& out_dir, bool with_timings = false);

}  // namespace rejlasso

#endif  // REJLASSO_EXPERIMENTS_HPP
