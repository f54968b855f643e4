#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "symprop/distributions.hpp"

namespace symprop {

/// The multiset of symbol multiplicities of a sample, stored ascending.
///
/// Two samples with equal profiles have equal probability under every
/// relabeling of a distribution, which makes the profile a sufficient
/// statistic for symmetric properties.
class Profile {
 public:
  Profile() = default;
  /// Sorts the input; throws std::invalid_argument on a zero multiplicity or
  /// an empty list.
  explicit Profile(std::vector<std::uint32_t> multiplicities);

  std::span<const std::uint32_t> multiplicities() const noexcept { return mult_; }
  std::uint64_t n() const noexcept { return n_; }
  /// Number of distinct symbols in the sample.
  std::size_t parts() const noexcept { return mult_.size(); }

  friend bool operator==(const Profile&, const Profile&) = default;
  friend auto operator<=>(const Profile& a, const Profile& b) {
    return a.mult_ <=> b.mult_;
  }

 private:
  std::vector<std::uint32_t> mult_;
  std::uint64_t n_ = 0;
};

/// phi_mu: how many symbols occur exactly mu times.
using Prevalence = std::map<std::uint32_t, std::uint32_t>;

Profile extract_profile(std::span<const Symbol> samples);

/// Every profile of length n (the integer partitions of n), each ascending,
/// in reverse-lexicographic order of the descending form starting at {n}.
/// Guarded to 1 <= n <= 60.
std::vector<Profile> enumerate_profiles(std::uint32_t n);

Prevalence prevalence(const Profile& profile);
Profile from_prevalence(const Prevalence& prevalence);

/// "1,1,2,2,5"
std::string format_profile(const Profile& profile);
Profile parse_profile(std::string_view text);

/// Probability that n i.i.d. draws from `probs` have profile `profile`:
///
///   n! / prod_j mu_j!  *  sum over assignments of the parts to distinct
///   symbols, with equal parts unordered, of prod_j p(x_j)^{mu_j}.
///
/// Exactly 0 when the profile has more parts than the support.
double profile_probability(std::span<const double> probs, const Profile& profile);
double profile_probability(const DiscreteDistribution& dist, const Profile& profile);

/// log of profile_probability; switches to log-space accumulation when the
/// linear sum would underflow. -inf for impossible profiles.
double profile_log_probability(std::span<const double> probs, const Profile& profile);
double profile_log_probability(const DiscreteDistribution& dist, const Profile& profile);

/// Log probability together with its gradient d log p(phi) / d p(x), written
/// into `gradient` (same length as `probs`). The gradient is finite whenever
/// the log probability is; for an impossible profile it is left at zero.
double profile_log_probability_gradient(std::span<const double> probs,
                                        const Profile& profile,
                                        std::span<double> gradient);

}  // namespace symprop
