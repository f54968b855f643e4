#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "symprop/distributions.hpp"
#include "symprop/profiles.hpp"

namespace symprop {

/// Inclusive range of candidate support sizes.
struct SupportRange {
  std::size_t lo = 1;
  std::size_t hi = 1;
};

/// "3..9" or a single "5".
SupportRange parse_support_range(std::string_view text);

/// From the number of profile parts up to n + ceil(n / 2).
/// PML can use more symbols than were observed ({1,1,2} -> uniform over 5).
SupportRange default_support_range(const Profile& profile);

struct SupportSizeResult {
  std::size_t support = 0;
  double log_likelihood = 0.0;
  double beta_empirical = 0.0;
};

/// A candidate profile-maximum-likelihood distribution.
///
/// beta_empirical is relative to the best likelihood this search found, not
/// to the true PML; only pml_exact_tiny's grid check backs a global claim.
struct PmlResult {
  DiscreteDistribution dist{std::vector<double>{1.0}};
  double log_likelihood = 0.0;
  double beta_empirical = 1.0;
  SupportRange support_searched;
  std::vector<SupportSizeResult> per_support;
  bool grid_certified = false;

  double likelihood() const;
};

struct PmlSettings {
  std::optional<SupportRange> support;
  unsigned restarts = 50;
  std::uint64_t seed = 0;
  /// 0 = SYMPROP_THREADS / hardware default.
  unsigned threads = 1;
  unsigned max_iterations = 4000;
  double tolerance = 1e-10;
};

inline constexpr std::uint64_t kMaxPmlSampleSize = 40;
inline constexpr std::uint64_t kMaxTinyPmlSampleSize = 10;
inline constexpr std::size_t kMaxTinyPmlSupport = 12;

struct AscentResult {
  std::vector<double> probs;
  double log_likelihood = 0.0;
  unsigned iterations = 0;
  /// Log-likelihood after each accepted step, starting with the start point.
  std::vector<double> trajectory;
};

/// Projected-gradient ascent of log p(phi) over the simplex of start.size()
/// coordinates, with Armijo backtracking. Every accepted step strictly
/// increases the likelihood; stops when an accepted step gains less than
/// `tolerance` or no step is accepted.
AscentResult ascend_profile_likelihood(const Profile& profile, std::vector<double> start,
                                       unsigned max_iterations = 4000,
                                       double tolerance = 1e-10);

/// Euclidean projection onto the probability simplex.
void project_onto_simplex(std::span<double> values);

/// Multistart ascent over every support size in the range. Each size starts
/// from the uniform distribution, from the empirical distribution of the
/// profile (when it fits), and from `restarts` Dirichlet(1) draws seeded by
/// (seed, size, restart). Sizes below the number of profile parts cannot
/// produce the profile and are skipped. Ties go to the smaller support.
///
/// Throws std::invalid_argument for profile.n() > 40 or an empty range.
PmlResult pml_optimize(const Profile& profile, const PmlSettings& settings);
PmlResult pml_optimize(const Profile& profile, SupportRange range, unsigned restarts,
                       std::uint64_t seed);

/// Global PML over supports up to max_support for very short profiles:
/// multistart ascent (50 restarts per size) plus a sweep of every sorted
/// distribution on the 1/64 simplex grid. The returned likelihood is at least
/// every grid value. Guards: n <= 10, max_support <= 12.
PmlResult pml_exact_tiny(const Profile& profile, std::size_t max_support);

/// exp(candidate log-likelihood - reference log-likelihood); 0 when the
/// candidate cannot produce the profile. Values above 1 mean the reference
/// was not the maximizer.
double beta_certificate(const DiscreteDistribution& candidate, const Profile& profile,
                        const PmlResult& reference);

/// true_property of the PML distribution of the sample's profile. For
/// DistanceToUniform(k) the support search is capped at k.
double pml_plugin(std::span<const Symbol> samples, const PropertyKind& kind,
                  const PmlSettings& settings = {});

}  // namespace symprop
