#include "symprop/profiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace symprop {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxStates = std::size_t{1} << 24;

// Sum over assignments of profile parts to distinct symbols, grouped by
// multiplicity so that equal parts are unordered. The DP runs over symbols;
// its state counts how many symbols have been given each distinct
// multiplicity, encoded mixed-radix.
struct StateSpace {
  std::vector<std::uint32_t> mult;      // distinct multiplicities
  std::vector<std::uint32_t> capacity;  // phi_mu for each
  std::vector<std::size_t> stride;
  std::size_t states = 1;
  double log_coefficient = 0.0;         // log n! - sum_j log mu_j!

  explicit StateSpace(const Profile& profile) {
    const auto prev = prevalence(profile);
    for (const auto& [mu, count] : prev) {
      mult.push_back(mu);
      capacity.push_back(count);
      stride.push_back(states);
      if (states > kMaxStates / (count + 1)) {
        throw std::invalid_argument("profile too rich for exact evaluation");
      }
      states *= count + 1;
    }
    log_coefficient = std::lgamma(static_cast<double>(profile.n()) + 1.0);
    for (auto mu : profile.multiplicities()) {
      log_coefficient -= std::lgamma(static_cast<double>(mu) + 1.0);
    }
  }

  std::size_t digit(std::size_t state, std::size_t d) const {
    return (state / stride[d]) % (capacity[d] + 1);
  }
};

struct LinearSpace {
  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double add(double a, double b) { return a + b; }
  static double mul(double a, double b) { return a * b; }
  // p^mu and mu * p^(mu-1)
  static double power(double p, std::uint32_t mu) { return std::pow(p, mu); }
  static double derivative(double p, std::uint32_t mu) {
    return mu == 1 ? 1.0 : static_cast<double>(mu) * std::pow(p, mu - 1);
  }
  static double to_log(double v) { return std::log(v); }
};

struct LogSpace {
  static double zero() { return kNegInf; }
  static double one() { return 0.0; }
  static double add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    return a > b ? a + std::log1p(std::exp(b - a)) : b + std::log1p(std::exp(a - b));
  }
  static double mul(double a, double b) { return a + b; }
  static double power(double p, std::uint32_t mu) {
    return p > 0.0 ? mu * std::log(p) : kNegInf;
  }
  static double derivative(double p, std::uint32_t mu) {
    if (mu == 1) return 0.0;
    return p > 0.0 ? std::log(static_cast<double>(mu)) + (mu - 1) * std::log(p) : kNegInf;
  }
  static double to_log(double v) { return v; }
};

template <typename Space>
double forward_sum(const StateSpace& space, std::span<const double> probs) {
  std::vector<double> cur(space.states, Space::zero());
  std::vector<double> next(space.states);
  cur[0] = Space::one();
  const std::size_t D = space.mult.size();
  std::vector<double> term(D);
  for (double p : probs) {
    if (!(p > 0.0)) continue;
    for (std::size_t d = 0; d < D; ++d) term[d] = Space::power(p, space.mult[d]);
    next = cur;
    for (std::size_t s = 0; s < space.states; ++s) {
      if (cur[s] == Space::zero()) continue;
      for (std::size_t d = 0; d < D; ++d) {
        if (space.digit(s, d) < space.capacity[d]) {
          auto& slot = next[s + space.stride[d]];
          slot = Space::add(slot, Space::mul(cur[s], term[d]));
        }
      }
    }
    cur.swap(next);
  }
  return cur.back();
}

template <typename Space>
double sum_with_gradient(const StateSpace& space, std::span<const double> probs,
                         std::span<double> grad_of_sum) {
  const std::size_t S = probs.size();
  const std::size_t T = space.states;
  const std::size_t D = space.mult.size();

  // forward[x] holds the table before symbol x is processed.
  std::vector<std::vector<double>> forward(S + 1, std::vector<double>(T, Space::zero()));
  forward[0][0] = Space::one();
  std::vector<double> term(D);
  for (std::size_t x = 0; x < S; ++x) {
    const auto& cur = forward[x];
    auto& next = forward[x + 1];
    next = cur;
    for (std::size_t d = 0; d < D; ++d) term[d] = Space::power(probs[x], space.mult[d]);
    for (std::size_t s = 0; s < T; ++s) {
      if (cur[s] == Space::zero()) continue;
      for (std::size_t d = 0; d < D; ++d) {
        if (space.digit(s, d) < space.capacity[d] && term[d] != Space::zero()) {
          auto& slot = next[s + space.stride[d]];
          slot = Space::add(slot, Space::mul(cur[s], term[d]));
        }
      }
    }
  }
  const double total = forward[S][T - 1];

  // backward[r] = sum over assignments of the symbols after x that fill the
  // remaining-count vector r exactly.
  std::vector<double> backward(T, Space::zero());
  std::vector<double> prev(T);
  backward[0] = Space::one();
  for (std::size_t xi = S; xi-- > 0;) {
    const auto& before = forward[xi];
    double g = Space::zero();
    for (std::size_t d = 0; d < D; ++d) {
      const double dterm = Space::derivative(probs[xi], space.mult[d]);
      if (dterm == Space::zero()) continue;
      for (std::size_t s = 0; s < T; ++s) {
        if (before[s] == Space::zero() || space.digit(s, d) >= space.capacity[d]) continue;
        const std::size_t remaining = T - 1 - s - space.stride[d];
        if (backward[remaining] == Space::zero()) continue;
        g = Space::add(g, Space::mul(Space::mul(before[s], dterm), backward[remaining]));
      }
    }
    grad_of_sum[xi] = g;

    prev = backward;
    for (std::size_t d = 0; d < D; ++d) term[d] = Space::power(probs[xi], space.mult[d]);
    for (std::size_t r = 0; r < T; ++r) {
      for (std::size_t d = 0; d < D; ++d) {
        if (space.digit(r, d) == 0 || term[d] == Space::zero()) continue;
        const double from = backward[r - space.stride[d]];
        if (from == Space::zero()) continue;
        prev[r] = Space::add(prev[r], Space::mul(term[d], from));
      }
    }
    backward.swap(prev);
  }
  return total;
}

// Linear-space sums are exact enough and several times faster; fall back to
// log space when the sum leaves the normal double range.
constexpr double kLinearFloor = 1e-280;
constexpr double kLinearCeiling = 1e280;

}  // namespace

Profile::Profile(std::vector<std::uint32_t> multiplicities)
    : mult_(std::move(multiplicities)) {
  if (mult_.empty()) throw std::invalid_argument("profile must be nonempty");
  std::sort(mult_.begin(), mult_.end());
  if (mult_.front() == 0) throw std::invalid_argument("profile multiplicities must be >= 1");
  n_ = std::accumulate(mult_.begin(), mult_.end(), std::uint64_t{0});
}

Profile extract_profile(std::span<const Symbol> samples) {
  if (samples.empty()) throw std::invalid_argument("cannot profile an empty sample");
  std::unordered_map<Symbol, std::uint32_t> counts;
  for (Symbol x : samples) ++counts[x];
  std::vector<std::uint32_t> mult;
  mult.reserve(counts.size());
  for (const auto& [sym, c] : counts) mult.push_back(c);
  return Profile(std::move(mult));
}

std::vector<Profile> enumerate_profiles(std::uint32_t n) {
  if (n < 1 || n > 60) {
    throw std::invalid_argument("enumerate_profiles: n must be in [1, 60]");
  }
  std::vector<Profile> out;
  std::vector<std::uint32_t> prefix;
  // Ascending parts, emitted in lexicographic order.
  auto recurse = [&](auto&& self, std::uint32_t remaining, std::uint32_t min_part) -> void {
    for (std::uint32_t part = min_part; part <= remaining; ++part) {
      if (part == remaining) {
        prefix.push_back(part);
        out.emplace_back(prefix);
        prefix.pop_back();
      } else if (remaining - part >= part) {
        prefix.push_back(part);
        self(self, remaining - part, part);
        prefix.pop_back();
      }
    }
  };
  recurse(recurse, n, 1);
  return out;
}

Prevalence prevalence(const Profile& profile) {
  Prevalence out;
  for (auto mu : profile.multiplicities()) ++out[mu];
  return out;
}

Profile from_prevalence(const Prevalence& prev) {
  std::vector<std::uint32_t> mult;
  for (const auto& [mu, count] : prev) {
    if (mu == 0) throw std::invalid_argument("prevalence keys must be >= 1");
    mult.insert(mult.end(), count, mu);
  }
  return Profile(std::move(mult));
}

std::string format_profile(const Profile& profile) {
  std::string out;
  for (auto mu : profile.multiplicities()) {
    if (!out.empty()) out += ',';
    out += std::to_string(mu);
  }
  return out;
}

Profile parse_profile(std::string_view text) {
  std::vector<std::uint32_t> mult;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    auto token = text.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    std::uint32_t value{};
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || value == 0) {
      throw std::invalid_argument("invalid profile entry '" + std::string(token) + "'");
    }
    mult.push_back(value);
    start = end + 1;
  }
  return Profile(std::move(mult));
}

double profile_log_probability(std::span<const double> probs, const Profile& profile) {
  if (profile.n() == 0) throw std::invalid_argument("empty profile");
  const auto support = static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
  if (profile.parts() > support) return kNegInf;
  const StateSpace space(profile);
  const double linear = forward_sum<LinearSpace>(space, probs);
  double log_sum = 0.0;
  if (linear > kLinearFloor && linear < kLinearCeiling) {
    log_sum = std::log(linear);
  } else {
    log_sum = forward_sum<LogSpace>(space, probs);
  }
  if (log_sum == kNegInf) return kNegInf;
  return std::min(0.0, space.log_coefficient + log_sum);
}

double profile_log_probability(const DiscreteDistribution& dist, const Profile& profile) {
  return profile_log_probability(dist.probs(), profile);
}

double profile_probability(std::span<const double> probs, const Profile& profile) {
  return std::exp(profile_log_probability(probs, profile));
}

double profile_probability(const DiscreteDistribution& dist, const Profile& profile) {
  return profile_probability(dist.probs(), profile);
}

double profile_log_probability_gradient(std::span<const double> probs,
                                        const Profile& profile,
                                        std::span<double> gradient) {
  if (gradient.size() != probs.size()) {
    throw std::invalid_argument("gradient buffer must match the distribution length");
  }
  std::fill(gradient.begin(), gradient.end(), 0.0);
  const auto support = static_cast<std::size_t>(
      std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
  if (profile.parts() > support) return kNegInf;

  const StateSpace space(profile);
  std::vector<double> grad(probs.size());
  const double linear = sum_with_gradient<LinearSpace>(space, probs, grad);
  if (linear > kLinearFloor && linear < kLinearCeiling) {
    for (std::size_t x = 0; x < probs.size(); ++x) gradient[x] = grad[x] / linear;
    return std::min(0.0, space.log_coefficient + std::log(linear));
  }
  const double log_sum = sum_with_gradient<LogSpace>(space, probs, grad);
  if (log_sum == kNegInf) return kNegInf;
  for (std::size_t x = 0; x < probs.size(); ++x) {
    gradient[x] = grad[x] == kNegInf ? 0.0 : std::exp(grad[x] - log_sum);
  }
  return std::min(0.0, space.log_coefficient + log_sum);
}

}  // namespace symprop
