#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "symprop/distributions.hpp"
#include "symprop/poly_approx.hpp"

namespace symprop {

enum class EstimatorMode { Paper, Performance };
enum class Smoothing { Poisson, Binomial };

EstimatorMode parse_mode(std::string_view text);
std::string_view to_string(EstimatorMode mode);

/// Tuning for the split-sample polynomial estimators and the smoothed
/// Good-Toulmin estimators.
///
/// Paper mode uses c2 = 36, c1 = 2 c2 and degree max(2, floor(0.25 alpha ln n)).
/// Those degrees are 2 at any desk-scale n, so performance mode switches to
/// degree floor(0.5 ln n) and thresholds c2 = 0.25, c1 = 0.5.
struct EstimatorConfig {
  double c1 = 72.0;
  double c2 = 36.0;
  double alpha = 0.1;
  std::optional<unsigned> degree_override;
  /// Smoothing mean r; defaults to ln(3 / epsilon).
  std::optional<double> r_override;
  double epsilon = 0.1;
  EstimatorMode mode = EstimatorMode::Paper;
  Smoothing smoothing = Smoothing::Poisson;
  /// Reject coverage horizons beyond n * floor(1 + alpha ln n / r).
  bool horizon_guard = false;

  static EstimatorConfig paper(double epsilon = 0.1);
  static EstimatorConfig performance(double epsilon = 0.1);
  static EstimatorConfig for_mode(EstimatorMode mode, double epsilon = 0.1);

  unsigned degree(std::uint64_t n) const;
  double smoothing_mean() const;
  /// Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

struct SymbolCounts {
  Symbol symbol = 0;
  std::uint32_t first = 0;   // N'_x
  std::uint32_t second = 0;  // N_x
};

/// A 2n-sample cut into its first and second n draws, with per-symbol counts
/// for each half. No shuffling: callers own the randomization.
class SplitSample {
 public:
  /// Requires an even, nonempty sample.
  explicit SplitSample(std::span<const Symbol> samples);
  SplitSample(std::span<const Symbol> first, std::span<const Symbol> second);

  std::uint64_t n() const noexcept { return first_.size(); }
  std::span<const Symbol> first_half() const noexcept { return first_; }
  std::span<const Symbol> second_half() const noexcept { return second_; }
  /// Symbols seen in either half, ascending by symbol.
  std::span<const SymbolCounts> counts() const noexcept { return counts_; }

 private:
  void tally();

  Sample first_;
  Sample second_;
  std::vector<SymbolCounts> counts_;
};

/// Estimators of the form clamp(sum_x g_x(N'_x, N_x), lower, upper), where
/// symbols of the declared alphabet that never appear contribute g_x(0, 0).
class SplitEstimator {
 public:
  SplitEstimator(std::uint64_t n, std::uint64_t k, double lower, double upper)
      : n_(n), k_(k), lower_(lower), upper_(upper) {}
  virtual ~SplitEstimator() = default;

  virtual double contribution(std::uint64_t first_count, std::uint64_t second_count) const = 0;

  /// Unclamped sum over the alphabet.
  double raw_sum(const SplitSample& split) const;
  double estimate(const SplitSample& split) const;
  double clamp(double raw) const;

  std::uint64_t n() const noexcept { return n_; }
  std::uint64_t k() const noexcept { return k_; }
  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }

 private:
  std::uint64_t n_;
  std::uint64_t k_;
  double lower_;
  double upper_;
};

/// Entropy (nats): polynomial branch for N'_x < c2 ln n and N_x < c1 ln n,
/// zero for N'_x < c2 ln n and N_x >= c1 ln n, and the bias-corrected
/// plug-in -q ln q + 1/(2n) with q = N_x / n otherwise. The polynomial is
/// the best approximation of -y ln y on [0, c1 ln n / n] with its constant
/// term dropped, so unseen symbols contribute nothing. Clamped to [0, ln k].
class EntropySplitEstimator final : public SplitEstimator {
 public:
  EntropySplitEstimator(std::uint64_t n, std::uint64_t k, const EstimatorConfig& cfg);

  double contribution(std::uint64_t first_count, std::uint64_t second_count) const override;

  const PolynomialApprox& polynomial() const noexcept { return poly_; }
  double first_threshold() const noexcept { return first_threshold_; }
  double second_threshold() const noexcept { return second_threshold_; }

  /// 8 max(e^{L^2/n} max|b_i|, L_g/n, g(c1 ln n / n), 1/(2n)): the largest
  /// change a single replaced sample can cause.
  double bounded_difference_bound() const;

 private:
  PolynomialApprox poly_;
  std::vector<double> shifted_;  // poly_ coefficients with b_0 = 0
  double first_threshold_;
  double second_threshold_;
};

/// L1 distance to the uniform distribution on {0..k-1}. Case 1
/// (1/k < c2 ln n / n) uses the entropy-style thresholds with g(y) = |y - 1/k|
/// approximated on [0, c1 ln n / n]. Case 2 thresholds the normalized
/// deviations |N'_x/n - 1/k| and |N_x/n - 1/k| against sqrt(c2 ln n / (k n))
/// and sqrt(c1 ln n / (k n)), and approximates around 1/k. Clamped to [0, 2].
class UniformitySplitEstimator final : public SplitEstimator {
 public:
  UniformitySplitEstimator(std::uint64_t n, std::uint64_t k, const EstimatorConfig& cfg);

  double contribution(std::uint64_t first_count, std::uint64_t second_count) const override;

  bool case_two() const noexcept { return case_two_; }
  const PolynomialApprox& polynomial() const noexcept { return poly_; }

 private:
  bool case_two_;
  double first_threshold_;
  double second_threshold_;
  PolynomialApprox poly_;
};

/// Property of the empirical distribution of the whole sample.
double sml_plugin(std::span<const Symbol> samples, const PropertyKind& kind);

/// Throws std::invalid_argument for n < 2, k < 2, or c2 ln n < 1 ("sample too
/// small for split estimator").
double entropy_estimate(const SplitSample& split, std::uint64_t k, const EstimatorConfig& cfg);

/// Symbols must lie in {0..k-1}; throws otherwise or for k = 0.
double dtu_estimate(const SplitSample& split, std::uint64_t k, const EstimatorConfig& cfg);

/// log Pr(Z >= i) for Z ~ Poisson(r), accurate far into the tail.
double log_poisson_tail(std::uint64_t i, double r);

/// Coefficient 1 - (-t)^i Pr(Z >= i) of phi_i in the smoothed Good-Toulmin
/// estimator.
double good_toulmin_coefficient(std::uint64_t i, double t, double r,
                                Smoothing smoothing = Smoothing::Poisson);

/// sum_i phi_i (1 - (-t)^i Pr(Z >= i)) with t = (m - n) / n and Z smoothed
/// with mean r. Equals the observed distinct count when m = n. Throws for
/// m < n (and for m past the horizon guard when enabled).
double support_coverage_estimate(std::span<const Symbol> samples, std::uint64_t m,
                                 const EstimatorConfig& cfg);
/// Same, from precomputed prevalences phi_1..phi_n (index 0 unused).
double support_coverage_from_prevalence(std::span<const std::uint64_t> phi, std::uint64_t n,
                                        std::uint64_t m, const EstimatorConfig& cfg);

/// S(p) / k estimated as S_hat_m / k with m = ceil(k ln(3/eps)) and
/// r = ln(3/eps), clamped to [0, 1]. Assumes every nonzero p(x) >= 1/k.
double support_estimate(std::span<const Symbol> samples, std::uint64_t k, double epsilon);
/// Unclamped S_hat_m / k.
double support_estimate_raw(std::span<const Symbol> samples, std::uint64_t k, double epsilon);

using SampleEstimator = std::function<double(std::span<const Symbol>)>;

/// Lower median of `base` applied to `blocks` consecutive equal blocks; a
/// remainder shorter than one block is ignored.
double median_boost(const SampleEstimator& base, std::span<const Symbol> samples,
                    std::size_t blocks);
double lower_median(std::vector<double> values);

}  // namespace symprop
