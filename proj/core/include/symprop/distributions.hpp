#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace symprop {

/// Symbols are dense integers 0..k-1. Symmetric properties never look at the
/// label itself, only at how often it occurs.
using Symbol = std::uint32_t;
using Sample = std::vector<Symbol>;

/// A finite probability vector over the alphabet {0, ..., k-1}.
///
/// Construction validates nonnegativity and normalization (1e-12 absolute)
/// and throws std::invalid_argument otherwise. Instances are immutable.
class DiscreteDistribution {
 public:
  explicit DiscreteDistribution(std::vector<double> probs);
  DiscreteDistribution(std::vector<double> probs, std::vector<Symbol> labels);

  std::span<const double> probs() const noexcept { return probs_; }
  double operator[](std::size_t i) const noexcept { return probs_[i]; }

  /// Number of entries, zero-probability entries included.
  std::size_t alphabet_size() const noexcept { return probs_.size(); }
  /// Number of strictly positive entries.
  std::size_t support_size() const noexcept;

  const std::vector<Symbol>& labels() const noexcept { return labels_; }

  /// Builds a distribution from nonnegative weights, normalizing them.
  static DiscreteDistribution from_weights(std::span<const double> weights);

 private:
  std::vector<double> probs_;
  std::vector<Symbol> labels_;
};

struct Entropy {};
struct SupportSize {};
struct SupportCoverage {
  std::uint64_t m = 0;
};
struct DistanceToUniform {
  std::uint64_t k = 0;
};

using PropertyKind =
    std::variant<Entropy, SupportSize, SupportCoverage, DistanceToUniform>;

/// "entropy", "support", "coverage:m", "dtu:k".
std::string to_string(const PropertyKind& kind);
PropertyKind parse_property(std::string_view text);

DiscreteDistribution make_uniform(std::size_t k);
DiscreteDistribution make_zipf(std::size_t k, double s);
/// First k/2 symbols carry `ratio` times the probability of the rest.
DiscreteDistribution make_twostep(std::size_t k, double ratio);
DiscreteDistribution make_point_mass(std::size_t k = 1, Symbol at = 0);

/// Parses `uniform:k`, `zipf:k:s`, `twostep:k:ratio` (and `point:k`).
DiscreteDistribution parse_distribution(std::string_view spec);

/// n i.i.d. draws. Deterministic in (dist, n, seed) across platforms: the
/// generator is mt19937_64 and draws are mapped by inverse CDF with a 53-bit
/// uniform, so no implementation-defined std:: distributions are involved.
Sample sample(const DiscreteDistribution& dist, std::size_t n,
              std::uint64_t seed);

/// H(p) in nats, with 0 log 0 = 0.
double entropy(std::span<const double> probs);
/// S_m(p) = sum_x 1 - (1 - p(x))^m.
double support_coverage(std::span<const double> probs, std::uint64_t m);
/// ||p - u_k||_1; entries beyond probs.size() are treated as zero.
double distance_to_uniform(std::span<const double> probs, std::uint64_t k);

double true_property(const DiscreteDistribution& dist, const PropertyKind& kind);
double true_property(std::span<const double> probs, const PropertyKind& kind);

/// Empirical frequencies N_x / n over symbols 0..max(sample).
DiscreteDistribution empirical_distribution(std::span<const Symbol> samples);

/// Whitespace-separated integers, one sequence per line. Blank lines are
/// skipped; malformed tokens throw std::runtime_error naming the line.
std::vector<Sample> read_samples(std::istream& in);
void write_samples(std::ostream& out, std::span<const Sample> sequences);

}  // namespace symprop
