#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprop/distributions.hpp"
#include "symprop/estimators.hpp"
#include "symprop/profiles.hpp"

namespace symprop {

/// sml: empirical plug-in. poly: split-sample polynomial estimator (entropy,
/// dtu). pml: PML plug-in (n <= 40). gt: smoothed Good-Toulmin (coverage,
/// support).
enum class EstimatorId { Sml, Poly, Pml, Gt };

std::string_view to_string(EstimatorId id);
EstimatorId parse_estimator(std::string_view text);
bool supports(EstimatorId id, const PropertyKind& kind);

struct ExperimentConfig {
  std::string dist_spec = "uniform:100";
  PropertyKind property = Entropy{};
  std::vector<std::uint64_t> n_grid{100};
  unsigned trials = 10;
  std::vector<EstimatorId> estimators{EstimatorId::Sml};
  std::uint64_t master_seed = 0;
  double epsilon = 0.1;
  EstimatorMode mode = EstimatorMode::Paper;
  /// Alphabet bound handed to poly and gt; defaults to the distribution's size.
  std::optional<std::uint64_t> k;
  unsigned pml_restarts = 10;
  /// 0 = SYMPROP_THREADS / hardware default.
  unsigned threads = 0;

  /// Throws std::invalid_argument on an empty or unsorted n_grid, zero trials,
  /// an unknown distribution, or an estimator that cannot handle the property.
  void validate() const;
};

/// Keys: dist, property, n_grid, trials, estimators, master_seed, epsilon,
/// mode, k, pml_restarts, threads. Only dist, property and n_grid are
/// required. Throws std::invalid_argument on bad content.
ExperimentConfig parse_experiment_config(std::string_view json_text);
/// Throws std::runtime_error when the file cannot be read.
ExperimentConfig load_experiment_config(const std::string& path);
std::string experiment_config_json(const ExperimentConfig& cfg);

struct TrialRecord {
  EstimatorId estimator = EstimatorId::Sml;
  std::uint64_t n = 0;
  unsigned trial = 0;
  std::uint64_t seed = 0;
  double estimate = 0.0;
  double truth = 0.0;
  double abs_error = 0.0;
  /// "ok", or "failed: <reason>" when the estimator rejected its input.
  std::string status = "ok";

  bool ok() const noexcept { return status == "ok"; }
};

struct AggregateRow {
  EstimatorId estimator = EstimatorId::Sml;
  std::uint64_t n = 0;
  unsigned ok_trials = 0;
  unsigned failed_trials = 0;
  double mae = 0.0;
  double rmse = 0.0;
  double prob_exceed = 0.0;  // fraction of ok trials with abs_error > epsilon
  double runtime_seconds = 0.0;
};

/// Support is reported as S/k and coverage as S_m/m so errors compare
/// against epsilon on a common scale.
struct ExperimentReport {
  ExperimentConfig config;
  double truth = 0.0;
  std::vector<TrialRecord> records;  // estimator-major, then n, then trial
  std::vector<AggregateRow> aggregates;

  const AggregateRow& aggregate(EstimatorId id, std::uint64_t n) const;
};

/// Seed of one trial: a pure function of (master seed, estimator, n, trial).
std::uint64_t trial_seed(std::uint64_t master_seed, EstimatorId id, std::uint64_t n,
                         unsigned trial);

/// One estimate of the configured property, normalized as in ExperimentReport.
/// `seed` drives the PML restarts. Throws whatever the estimator throws.
double run_estimator(EstimatorId id, const ExperimentConfig& cfg, std::span<const Symbol> samples,
                     std::uint64_t seed = 0);

ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Columns: estimator,property,dist,n,trial,estimate,truth,abs_error,seed,status.
/// Reals are printed with 17 significant digits; failed trials leave
/// estimate and abs_error empty. Output is a pure function of the report's
/// records.
void write_csv(std::ostream& out, const ExperimentReport& report);
/// Config echo, truth, aggregates and per-trial records. Runtime only when
/// `timing` is set, which keeps the default output reproducible.
std::string experiment_report_json(const ExperimentReport& report, bool timing = false);

struct ProbeResult {
  double max_change = 0.0;
  std::size_t evaluated = 0;
  bool exhaustive = false;
};

inline constexpr std::size_t kProbeBudget = 10'000;

/// Largest |f(X) - f(X')| over single-coordinate replacements X' of X.
/// Probes the first min(positions, |X|) positions against every symbol of
/// `alphabet`, exhaustively when that is at most kProbeBudget replacements
/// and otherwise on kProbeBudget of them drawn with `seed`.
ProbeResult bounded_difference_probe(const SampleEstimator& estimator,
                                     std::span<const Symbol> samples, std::size_t positions,
                                     std::span<const Symbol> alphabet, std::uint64_t seed = 0);

/// Every single replacement of a split sample over the alphabet {0..k-1}
/// (k = estimator.k()), evaluated exactly: a swap from symbol a to b in one
/// half only changes the terms of a and b, so each distinct (half, a, b)
/// needs two contribution() calls. Symbols must lie below k.
ProbeResult split_swap_probe(const SplitEstimator& estimator, const SplitSample& split);

struct MetaTheoremSettings {
  std::uint32_t n = 6;
  std::vector<double> epsilons{0.1, 0.2, 0.4};
  double grid_step = 0.05;
  std::vector<double> betas{1.0, 0.5, 0.1};
  /// Reference estimator values per profile, in enumerate_profiles(n) order.
  /// Defaults to the entropy of pml_exact_tiny(phi, 2), and 0 for profiles no
  /// binary distribution can produce.
  std::optional<std::vector<double>> reference;
};

struct MetaTheoremRow {
  double epsilon = 0.0;
  double beta = 1.0;
  double q = 0.0;               // the grid distribution (q, 1 - q)
  double reference_failure = 0.0;  // delta(p) of the reference estimator at epsilon
  double plugin_failure = 0.0;     // Pr[|f(p) - f(candidate)| > 2 epsilon]
  double bound = 0.0;              // delta * |Phi^n| / beta
  /// Profiles with p(phi) > delta / beta; none of them may make the plug-in
  /// fail. This is the pointwise step behind the bound, and it stays
  /// informative when the bound itself exceeds 1.
  std::size_t guarded_profiles = 0;
  std::size_t guarded_failures = 0;
  bool holds = true;
};

struct MetaTheoremReport {
  std::uint32_t n = 0;
  std::size_t profile_count = 0;
  std::vector<double> grid;
  std::vector<double> reference;      // per profile
  std::vector<double> delta;          // max_p delta(p), per epsilon
  std::vector<MetaTheoremRow> rows;   // epsilon-major, then beta, then q
  /// Largest disagreement between the closed-form profile probabilities and
  /// the direct 2^n sequence enumeration, and between the failure
  /// probabilities the two paths produce.
  double max_probability_discrepancy = 0.0;
  double max_failure_discrepancy = 0.0;
  /// Largest total probability of any failure set (must be <= 1).
  double max_failure_mass = 0.0;
  bool all_hold = true;
};

/// Exhaustive check of the ML meta-theorem on binary distributions. The
/// class P is the grid {(q, 1 - q) : q = 0, step, ..., 1}; p_phi is the grid
/// maximizer of p(phi) (first on ties). With delta = max_p delta(p), the
/// bound Pr[|f(p) - f(p_phi)| > 2 eps] <= delta |Phi^n| is checked at every
/// grid point. For beta < 1 the candidate is the worst grid distribution
/// with q(phi) >= beta p_phi(phi) and the bound is delta |Phi^n| / beta.
/// A row holds when the bound does and no guarded profile fails.
///
/// Guards: 1 <= n <= 10, 0 < grid_step <= 0.5, betas in (0, 1].
MetaTheoremReport verify_ml_metatheorem(const MetaTheoremSettings& settings);
std::string metatheorem_report_json(const MetaTheoremReport& report);

}  // namespace symprop
