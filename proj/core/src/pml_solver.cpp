#include "symprop/pml_solver.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "symprop/parallel.hpp"

namespace symprop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-20;
constexpr double kTieTolerance = 1e-10;
constexpr unsigned kGridResolution = 64;
constexpr unsigned kTinyRestarts = 50;

std::size_t parse_size(std::string_view token) {
  std::size_t value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
    throw std::invalid_argument("invalid support size '" + std::string(token) + "'");
  }
  return value;
}

std::vector<double> dirichlet_start(std::size_t size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<double> x(size);
  double total = 0.0;
  for (auto& v : x) {
    // Exponential(1) via inversion of a 53-bit uniform in (0, 1].
    const double u = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;
    v = -std::log(u);
    total += v;
  }
  for (auto& v : x) v /= total;
  return x;
}

struct Candidate {
  std::vector<double> probs;
  double log_likelihood = kNegInf;
};

// Drops entries too small to matter and renormalizes when that costs nothing
// in likelihood, so a support-6 search that converged to five symbols
// reports five.
Candidate polish(const Profile& profile, Candidate c) {
  std::vector<double> pruned = c.probs;
  for (auto& p : pruned) {
    if (p < 1e-12) p = 0.0;
  }
  const double total = std::accumulate(pruned.begin(), pruned.end(), 0.0);
  if (total <= 0.0) return c;
  for (auto& p : pruned) p /= total;
  const double ll = profile_log_probability(pruned, profile);
  if (ll >= c.log_likelihood - kTieTolerance) {
    c.probs = std::move(pruned);
    c.log_likelihood = ll;
  }
  return c;
}

DiscreteDistribution to_distribution(std::vector<double> probs) {
  std::sort(probs.begin(), probs.end(), std::greater<>());
  while (probs.size() > 1 && probs.back() == 0.0) probs.pop_back();
  return DiscreteDistribution::from_weights(probs);
}

void check_range(const Profile& profile, SupportRange range) {
  if (profile.n() == 0) throw std::invalid_argument("empty profile");
  if (range.lo == 0 || range.lo > range.hi) {
    throw std::invalid_argument("support range must satisfy 1 <= lo <= hi");
  }
}

// Every nonincreasing composition of `resolution` into at most max_parts
// positive parts, as probabilities.
template <typename Fn>
void for_each_sorted_grid_point(unsigned resolution, std::size_t max_parts, Fn&& fn) {
  std::vector<double> probs;
  auto recurse = [&](auto&& self, unsigned remaining, unsigned max_part) -> void {
    if (remaining == 0) {
      fn(std::span<const double>(probs));
      return;
    }
    if (probs.size() == max_parts) return;
    for (unsigned part = std::min(remaining, max_part); part >= 1; --part) {
      probs.push_back(static_cast<double>(part) / resolution);
      self(self, remaining - part, part);
      probs.pop_back();
    }
  };
  recurse(recurse, resolution, resolution);
}

}  // namespace

double PmlResult::likelihood() const { return std::exp(log_likelihood); }

SupportRange parse_support_range(std::string_view text) {
  const auto dots = text.find("..");
  SupportRange range;
  if (dots == std::string_view::npos) {
    range.lo = range.hi = parse_size(text);
  } else {
    range.lo = parse_size(text.substr(0, dots));
    range.hi = parse_size(text.substr(dots + 2));
  }
  if (range.lo == 0 || range.lo > range.hi) {
    throw std::invalid_argument("support range must satisfy 1 <= lo <= hi");
  }
  return range;
}

SupportRange default_support_range(const Profile& profile) {
  const auto n = static_cast<std::size_t>(profile.n());
  return {std::max<std::size_t>(1, profile.parts()), n + (n + 1) / 2};
}

void project_onto_simplex(std::span<double> values) {
  if (values.empty()) return;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t j = 0; j < sorted.size(); ++j) {
    cumulative += sorted[j];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) theta = candidate;
  }
  for (auto& v : values) v = std::max(0.0, v - theta);
}

AscentResult ascend_profile_likelihood(const Profile& profile, std::vector<double> start,
                                       unsigned max_iterations, double tolerance) {
  AscentResult out;
  const std::size_t S = start.size();
  if (S == 0) throw std::invalid_argument("ascent needs at least one coordinate");
  project_onto_simplex(start);
  std::vector<double> x = std::move(start);
  std::vector<double> grad(S);
  std::vector<double> trial(S);
  double f = profile_log_probability_gradient(x, profile, grad);
  out.trajectory.push_back(f);
  if (f == kNegInf) {
    out.probs = std::move(x);
    out.log_likelihood = f;
    return out;
  }

  double step = 0.0;
  for (unsigned iter = 0; iter < max_iterations; ++iter) {
    const double gmax = std::abs(*std::max_element(
        grad.begin(), grad.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
    if (!(gmax > 0.0) || !std::isfinite(gmax)) break;
    if (step == 0.0) step = 0.1 / gmax;
    step *= 2.0;

    bool accepted = false;
    double f_trial = kNegInf;
    while (step * gmax > kMinStep) {
      for (std::size_t i = 0; i < S; ++i) trial[i] = x[i] + step * grad[i];
      project_onto_simplex(trial);
      double directional = 0.0;
      for (std::size_t i = 0; i < S; ++i) directional += grad[i] * (trial[i] - x[i]);
      f_trial = profile_log_probability(trial, profile);
      if (f_trial > f && f_trial >= f + kArmijo * directional) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    out.iterations = iter + 1;
    if (!accepted) break;
    const double gain = f_trial - f;
    x.swap(trial);
    f = profile_log_probability_gradient(x, profile, grad);
    out.trajectory.push_back(f);
    if (gain < tolerance) break;
  }
  out.probs = std::move(x);
  out.log_likelihood = f;
  return out;
}

PmlResult pml_optimize(const Profile& profile, const PmlSettings& settings) {
  const SupportRange range = settings.support.value_or(default_support_range(profile));
  check_range(profile, range);
  if (profile.n() > kMaxPmlSampleSize) {
    throw std::invalid_argument("pml_optimize evaluates likelihoods exactly; n must be <= 40");
  }
  if (settings.restarts == 0) throw std::invalid_argument("pml_optimize needs restarts >= 1");

  // Work units: (support size, start index). Start 0 is uniform, start 1 the
  // empirical distribution, the rest Dirichlet draws.
  const std::size_t starts = settings.restarts + 2;
  std::vector<std::size_t> sizes;
  for (std::size_t s = range.lo; s <= range.hi; ++s) {
    if (s >= profile.parts()) sizes.push_back(s);
  }
  if (sizes.empty()) {
    throw std::invalid_argument("no support size in range can produce the profile");
  }

  std::vector<Candidate> results(sizes.size() * starts);
  parallel_for(results.size(), settings.threads, [&](std::size_t unit) {
    const std::size_t s = sizes[unit / starts];
    const std::size_t start = unit % starts;
    std::vector<double> x0;
    if (start == 0) {
      x0.assign(s, 1.0 / static_cast<double>(s));
    } else if (start == 1) {
      x0.assign(s, 0.0);
      const auto mult = profile.multiplicities();
      for (std::size_t j = 0; j < mult.size(); ++j) {
        x0[j] = static_cast<double>(mult[j]) / static_cast<double>(profile.n());
      }
    } else {
      x0 = dirichlet_start(s, derive_seed(settings.seed, s, start - 2));
    }
    auto ascent =
        ascend_profile_likelihood(profile, std::move(x0), settings.max_iterations,
                                  settings.tolerance);
    results[unit] = polish(profile, {std::move(ascent.probs), ascent.log_likelihood});
  });

  PmlResult out;
  out.support_searched = range;
  const Candidate* incumbent = nullptr;
  std::vector<const Candidate*> best_per_size(sizes.size(), nullptr);
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    for (std::size_t j = 0; j < starts; ++j) {
      const Candidate& c = results[si * starts + j];
      if (!best_per_size[si] || c.log_likelihood > best_per_size[si]->log_likelihood) {
        best_per_size[si] = &c;
      }
    }
    // Larger supports must beat the incumbent by more than the tie tolerance.
    if (!incumbent ||
        best_per_size[si]->log_likelihood > incumbent->log_likelihood + kTieTolerance) {
      incumbent = best_per_size[si];
    }
  }
  if (incumbent->log_likelihood == kNegInf) {
    throw std::runtime_error("no candidate distribution produced the profile");
  }
  out.dist = to_distribution(incumbent->probs);
  out.log_likelihood = profile_log_probability(out.dist, profile);
  out.beta_empirical = 1.0;
  for (std::size_t si = 0; si < sizes.size(); ++si) {
    const double ll = best_per_size[si]->log_likelihood;
    out.per_support.push_back(
        {sizes[si], ll, std::min(1.0, std::exp(ll - out.log_likelihood))});
  }
  return out;
}

PmlResult pml_optimize(const Profile& profile, SupportRange range, unsigned restarts,
                       std::uint64_t seed) {
  PmlSettings settings;
  settings.support = range;
  settings.restarts = restarts;
  settings.seed = seed;
  return pml_optimize(profile, settings);
}

PmlResult pml_exact_tiny(const Profile& profile, std::size_t max_support) {
  if (profile.n() > kMaxTinyPmlSampleSize) {
    throw std::invalid_argument("pml_exact_tiny supports n <= 10");
  }
  if (max_support == 0 || max_support > kMaxTinyPmlSupport) {
    throw std::invalid_argument("pml_exact_tiny supports 1 <= max_support <= 12");
  }
  if (profile.parts() > max_support) {
    throw std::invalid_argument("profile has more parts than max_support allows");
  }
  PmlSettings settings;
  settings.support = SupportRange{profile.parts(), max_support};
  settings.restarts = kTinyRestarts;
  settings.seed = 0x5eed;
  PmlResult result = pml_optimize(profile, settings);

  double grid_best = kNegInf;
  std::vector<double> grid_argmax;
  for_each_sorted_grid_point(kGridResolution, max_support, [&](std::span<const double> probs) {
    if (probs.size() < profile.parts()) return;
    const double ll = profile_log_probability(probs, profile);
    if (ll > grid_best) {
      grid_best = ll;
      grid_argmax.assign(probs.begin(), probs.end());
    }
  });

  if (grid_best > result.log_likelihood) {
    auto refined = ascend_profile_likelihood(profile, grid_argmax);
    Candidate c = polish(profile, {std::move(refined.probs), refined.log_likelihood});
    result.dist = to_distribution(std::move(c.probs));
    result.log_likelihood = profile_log_probability(result.dist, profile);
    for (auto& entry : result.per_support) {
      entry.beta_empirical = std::min(1.0, std::exp(entry.log_likelihood - result.log_likelihood));
    }
  }
  result.grid_certified = result.log_likelihood >= grid_best;
  return result;
}

double beta_certificate(const DiscreteDistribution& candidate, const Profile& profile,
                        const PmlResult& reference) {
  const double ll = profile_log_probability(candidate, profile);
  if (ll == kNegInf) return 0.0;
  return std::exp(ll - reference.log_likelihood);
}

double pml_plugin(std::span<const Symbol> samples, const PropertyKind& kind,
                  const PmlSettings& settings) {
  const Profile profile = extract_profile(samples);
  PmlSettings local = settings;
  SupportRange range = local.support.value_or(default_support_range(profile));
  if (const auto* dtu = std::get_if<DistanceToUniform>(&kind)) {
    range.hi = std::min<std::size_t>(range.hi, dtu->k);
    range.lo = std::min(range.lo, range.hi);
  }
  local.support = range;
  const PmlResult result = pml_optimize(profile, local);
  return true_property(result.dist, kind);
}

}  // namespace symprop
