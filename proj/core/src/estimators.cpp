#include "symprop/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace symprop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double neg_y_log_y(double y) { return y > 0.0 ? -y * std::log(y) : 0.0; }

double log_binomial_tail(std::uint64_t i, std::uint64_t trials, double q) {
  if (i == 0) return 0.0;
  if (i > trials || q <= 0.0) return kNegInf;
  if (q >= 1.0) return 0.0;
  const double lg_trials = std::lgamma(static_cast<double>(trials) + 1.0);
  double best = kNegInf;
  std::vector<double> logs;
  for (std::uint64_t j = i; j <= trials; ++j) {
    const double dj = static_cast<double>(j);
    const double lt = lg_trials - std::lgamma(dj + 1.0) -
                      std::lgamma(static_cast<double>(trials - j) + 1.0) + dj * std::log(q) +
                      static_cast<double>(trials - j) * std::log1p(-q);
    logs.push_back(lt);
    best = std::max(best, lt);
  }
  double acc = 0.0;
  for (double lt : logs) acc += std::exp(lt - best);
  return best + std::log(acc);
}

}  // namespace

EstimatorMode parse_mode(std::string_view text) {
  if (text == "paper") return EstimatorMode::Paper;
  if (text == "performance") return EstimatorMode::Performance;
  throw std::invalid_argument("unknown mode '" + std::string(text) +
                              "' (expected paper or performance)");
}

std::string_view to_string(EstimatorMode mode) {
  return mode == EstimatorMode::Paper ? "paper" : "performance";
}

EstimatorConfig EstimatorConfig::paper(double epsilon) {
  EstimatorConfig cfg;
  cfg.epsilon = epsilon;
  return cfg;
}

EstimatorConfig EstimatorConfig::performance(double epsilon) {
  EstimatorConfig cfg;
  cfg.epsilon = epsilon;
  cfg.mode = EstimatorMode::Performance;
  cfg.c2 = 0.25;
  cfg.c1 = 0.5;
  return cfg;
}

EstimatorConfig EstimatorConfig::for_mode(EstimatorMode mode, double epsilon) {
  return mode == EstimatorMode::Paper ? paper(epsilon) : performance(epsilon);
}

unsigned EstimatorConfig::degree(std::uint64_t n) const {
  if (degree_override) return *degree_override;
  const double ln_n = std::log(static_cast<double>(std::max<std::uint64_t>(n, 1)));
  if (mode == EstimatorMode::Paper) {
    return std::max(2u, static_cast<unsigned>(std::floor(0.25 * alpha * ln_n)));
  }
  return std::max(1u, static_cast<unsigned>(std::floor(0.5 * ln_n)));
}

double EstimatorConfig::smoothing_mean() const {
  if (r_override) return *r_override;
  return std::log(3.0 / epsilon);
}

void EstimatorConfig::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("c1 and c2 must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (r_override && !(*r_override >= 0.0)) throw std::invalid_argument("r must be >= 0");
  if (degree_override && *degree_override > kMaxApproxDegree) {
    throw std::invalid_argument("degree override above 40");
  }
}

SplitSample::SplitSample(std::span<const Symbol> samples) {
  if (samples.empty() || samples.size() % 2 != 0) {
    throw std::invalid_argument("split sample needs an even, nonempty sample");
  }
  const auto half = samples.size() / 2;
  first_.assign(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(half));
  second_.assign(samples.begin() + static_cast<std::ptrdiff_t>(half), samples.end());
  tally();
}

SplitSample::SplitSample(std::span<const Symbol> first, std::span<const Symbol> second)
    : first_(first.begin(), first.end()), second_(second.begin(), second.end()) {
  if (first_.empty() || first_.size() != second_.size()) {
    throw std::invalid_argument("split halves must be nonempty and of equal length");
  }
  tally();
}

void SplitSample::tally() {
  std::unordered_map<Symbol, SymbolCounts> table;
  for (Symbol x : first_) {
    auto& c = table[x];
    c.symbol = x;
    ++c.first;
  }
  for (Symbol x : second_) {
    auto& c = table[x];
    c.symbol = x;
    ++c.second;
  }
  counts_.clear();
  counts_.reserve(table.size());
  for (const auto& [sym, c] : table) counts_.push_back(c);
  std::sort(counts_.begin(), counts_.end(),
            [](const SymbolCounts& a, const SymbolCounts& b) { return a.symbol < b.symbol; });
}

double SplitEstimator::raw_sum(const SplitSample& split) const {
  if (split.n() != n_) throw std::invalid_argument("split sample length does not match estimator");
  double total = 0.0;
  for (const auto& c : split.counts()) total += contribution(c.first, c.second);
  const auto seen = static_cast<std::uint64_t>(split.counts().size());
  if (k_ > seen) total += static_cast<double>(k_ - seen) * contribution(0, 0);
  return total;
}

double SplitEstimator::clamp(double raw) const { return std::clamp(raw, lower_, upper_); }

double SplitEstimator::estimate(const SplitSample& split) const { return clamp(raw_sum(split)); }

EntropySplitEstimator::EntropySplitEstimator(std::uint64_t n, std::uint64_t k,
                                             const EstimatorConfig& cfg)
    : SplitEstimator(n, k, 0.0, std::log(static_cast<double>(std::max<std::uint64_t>(k, 1)))) {
  cfg.validate();
  if (n < 2) throw std::invalid_argument("entropy estimator needs n >= 2 per half");
  if (k < 2) throw std::invalid_argument("entropy estimator needs k >= 2");
  const double ln_n = std::log(static_cast<double>(n));
  first_threshold_ = cfg.c2 * ln_n;
  second_threshold_ = cfg.c1 * ln_n;
  if (first_threshold_ < 1.0) {
    throw std::invalid_argument("sample too small for split estimator (c2 ln n < 1)");
  }
  const double hi = std::min(1.0, second_threshold_ / static_cast<double>(n));
  poly_ = best_poly_approx(NegYLogY{}, {0.0, hi}, cfg.degree(n));
  shifted_ = poly_.coeffs;
  shifted_[0] = 0.0;
}

double EntropySplitEstimator::contribution(std::uint64_t first_count,
                                           std::uint64_t second_count) const {
  const auto dn = static_cast<double>(n());
  if (static_cast<double>(first_count) < first_threshold_) {
    if (static_cast<double>(second_count) < second_threshold_) {
      return falling_factorial_estimate(shifted_, second_count, n());
    }
    return 0.0;
  }
  return neg_y_log_y(static_cast<double>(second_count) / dn) + 1.0 / (2.0 * dn);
}

double EntropySplitEstimator::bounded_difference_bound() const {
  const auto dn = static_cast<double>(n());
  const double L = static_cast<double>(poly_.degree);
  const double coeff_term = std::exp(L * L / dn) * poly_.max_abs_coeff(1);
  double lipschitz = 0.0;
  for (std::uint64_t i = 1; i <= n(); ++i) {
    lipschitz = std::max(lipschitz, std::abs(neg_y_log_y(static_cast<double>(i) / dn) -
                                             neg_y_log_y(static_cast<double>(i - 1) / dn)));
  }
  lipschitz *= dn;  // L_g
  const double at_edge = neg_y_log_y(poly_.interval.hi);
  return 8.0 * std::max({coeff_term, lipschitz / dn, at_edge, 1.0 / (2.0 * dn)});
}

UniformitySplitEstimator::UniformitySplitEstimator(std::uint64_t n, std::uint64_t k,
                                                   const EstimatorConfig& cfg)
    : SplitEstimator(n, k, 0.0, 2.0) {
  cfg.validate();
  if (k == 0) throw std::invalid_argument("distance to uniformity needs k >= 1");
  if (n < 2) throw std::invalid_argument("distance to uniformity needs n >= 2 per half");
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const double ln_n = std::log(dn);
  const double u = 1.0 / dk;
  case_two_ = !(u < cfg.c2 * ln_n / dn);
  Interval interval;
  if (case_two_) {
    first_threshold_ = std::sqrt(cfg.c2 * ln_n / (dk * dn));
    second_threshold_ = std::sqrt(cfg.c1 * ln_n / (dk * dn));
    interval = {std::max(0.0, u - second_threshold_), std::min(1.0, u + second_threshold_)};
  } else {
    first_threshold_ = cfg.c2 * ln_n;
    second_threshold_ = cfg.c1 * ln_n;
    interval = {0.0, std::min(1.0, second_threshold_ / dn)};
  }
  poly_ = best_poly_approx(AbsShift{u}, interval, cfg.degree(n));
}

double UniformitySplitEstimator::contribution(std::uint64_t first_count,
                                              std::uint64_t second_count) const {
  const double dn = static_cast<double>(n());
  const double u = 1.0 / static_cast<double>(k());
  const double q = static_cast<double>(second_count) / dn;
  bool first_small = false;
  bool second_small = false;
  if (case_two_) {
    first_small = std::abs(static_cast<double>(first_count) / dn - u) < first_threshold_;
    second_small = std::abs(q - u) < second_threshold_;
  } else {
    first_small = static_cast<double>(first_count) < first_threshold_;
    second_small = static_cast<double>(second_count) < second_threshold_;
  }
  if (first_small) {
    return second_small ? falling_factorial_estimate(poly_, second_count, n()) : 0.0;
  }
  return std::abs(q - u);
}

double sml_plugin(std::span<const Symbol> samples, const PropertyKind& kind) {
  const auto empirical = empirical_distribution(samples);
  return true_property(empirical, kind);
}

double entropy_estimate(const SplitSample& split, std::uint64_t k, const EstimatorConfig& cfg) {
  return EntropySplitEstimator(split.n(), k, cfg).estimate(split);
}

double dtu_estimate(const SplitSample& split, std::uint64_t k, const EstimatorConfig& cfg) {
  if (k == 0) throw std::invalid_argument("distance to uniformity needs k >= 1");
  if (!split.counts().empty() && split.counts().back().symbol >= k) {
    throw std::invalid_argument("sample contains a symbol outside the declared alphabet");
  }
  return UniformitySplitEstimator(split.n(), k, cfg).estimate(split);
}

double log_poisson_tail(std::uint64_t i, double r) {
  if (i == 0) return 0.0;
  if (!(r > 0.0)) return kNegInf;
  const double di = static_cast<double>(i);
  if (di <= r) {
    // The tail is at least about 1/2 here; 1 - cdf loses nothing.
    double term = std::exp(-r);
    double cdf = 0.0;
    for (std::uint64_t j = 0; j < i; ++j) {
      cdf += term;
      term *= r / static_cast<double>(j + 1);
    }
    return std::log1p(-std::min(cdf, 1.0));
  }
  const double log_first = -r + di * std::log(r) - std::lgamma(di + 1.0);
  double sum = 1.0;
  double term = 1.0;
  for (std::uint64_t j = i + 1;; ++j) {
    term *= r / static_cast<double>(j);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return log_first + std::log(sum);
}

double good_toulmin_coefficient(std::uint64_t i, double t, double r, Smoothing smoothing) {
  if (i == 0) throw std::invalid_argument("Good-Toulmin coefficients start at i = 1");
  if (t < 0.0) throw std::invalid_argument("Good-Toulmin needs t >= 0");
  if (t == 0.0) return 1.0;
  double log_tail = kNegInf;
  if (smoothing == Smoothing::Poisson) {
    log_tail = log_poisson_tail(i, r);
  } else {
    const double q = 2.0 / (t + 2.0);
    const auto trials =
        static_cast<std::uint64_t>(std::max(1.0, std::round(r / q)));
    log_tail = log_binomial_tail(i, trials, q);
  }
  if (log_tail == kNegInf) return 1.0;
  const double magnitude = std::exp(static_cast<double>(i) * std::log(t) + log_tail);
  return (i % 2 == 1) ? 1.0 + magnitude : 1.0 - magnitude;
}

double support_coverage_from_prevalence(std::span<const std::uint64_t> phi, std::uint64_t n,
                                        std::uint64_t m, const EstimatorConfig& cfg) {
  if (n == 0) throw std::invalid_argument("support coverage needs a nonempty sample");
  if (m < n) throw std::invalid_argument("support coverage horizon m must be >= n");
  const double r = cfg.smoothing_mean();
  if (!(r >= 0.0)) throw std::invalid_argument("smoothing mean r must be >= 0");
  if (cfg.horizon_guard) {
    const double dn = static_cast<double>(n);
    const double factor = std::floor(1.0 + cfg.alpha * std::log(dn) / r);
    if (static_cast<double>(m) > dn * factor) {
      throw std::invalid_argument("coverage horizon beyond n * floor(1 + alpha ln n / r)");
    }
  }
  const double t = static_cast<double>(m - n) / static_cast<double>(n);
  double total = 0.0;
  for (std::size_t i = 1; i < phi.size(); ++i) {
    if (phi[i] == 0) continue;
    total += static_cast<double>(phi[i]) * good_toulmin_coefficient(i, t, r, cfg.smoothing);
  }
  return total;
}

double support_coverage_estimate(std::span<const Symbol> samples, std::uint64_t m,
                                 const EstimatorConfig& cfg) {
  if (samples.empty()) throw std::invalid_argument("support coverage needs a nonempty sample");
  std::unordered_map<Symbol, std::uint64_t> counts;
  for (Symbol x : samples) ++counts[x];
  std::vector<std::uint64_t> phi(samples.size() + 1, 0);
  for (const auto& [sym, c] : counts) ++phi[c];
  return support_coverage_from_prevalence(phi, samples.size(), m, cfg);
}

double support_estimate_raw(std::span<const Symbol> samples, std::uint64_t k, double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("support estimate needs epsilon in (0, 1)");
  }
  if (k == 0) throw std::invalid_argument("support estimate needs k >= 1");
  if (samples.empty()) throw std::invalid_argument("support estimate needs a nonempty sample");
  const double r = std::log(3.0 / epsilon);
  const auto m = static_cast<std::uint64_t>(std::ceil(static_cast<double>(k) * r));
  const double dk = static_cast<double>(k);
  if (samples.size() >= m) {
    // No extrapolation needed: the sample already covers the horizon.
    std::vector<Symbol> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
    return static_cast<double>(distinct) / dk;
  }
  EstimatorConfig cfg = EstimatorConfig::paper(epsilon);
  cfg.r_override = r;
  return support_coverage_estimate(samples, m, cfg) / dk;
}

double support_estimate(std::span<const Symbol> samples, std::uint64_t k, double epsilon) {
  return std::clamp(support_estimate_raw(samples, k, epsilon), 0.0, 1.0);
}

double lower_median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of an empty set");
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>((values.size() - 1) / 2);
  std::nth_element(values.begin(), mid, values.end());
  return *mid;
}

double median_boost(const SampleEstimator& base, std::span<const Symbol> samples,
                    std::size_t blocks) {
  if (blocks == 0) throw std::invalid_argument("median_boost needs at least one block");
  if (blocks > samples.size()) throw std::invalid_argument("more blocks than samples");
  const std::size_t block = samples.size() / blocks;
  std::vector<double> estimates;
  estimates.reserve(blocks);
  for (std::size_t b = 0; b < blocks; ++b) {
    estimates.push_back(base(samples.subspan(b * block, block)));
  }
  return lower_median(std::move(estimates));
}

}  // namespace symprop
