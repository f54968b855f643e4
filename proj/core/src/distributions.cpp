#include "symprop/distributions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

namespace symprop {

namespace {

constexpr double kNormalizationTolerance = 1e-12;

void validate(const std::vector<double>& probs) {
  if (probs.empty()) {
    throw std::invalid_argument("distribution must have at least one entry");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw std::invalid_argument("probabilities must be finite and >= 0");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTolerance) {
    throw std::invalid_argument("probabilities must sum to 1, got " +
                                std::to_string(total));
  }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

template <typename T>
T parse_number(std::string_view token, std::string_view what) {
  T value{};
  if constexpr (std::is_floating_point_v<T>) {
    // std::from_chars for double is not available on every libstdc++ we target.
    std::string buf(token);
    char* end = nullptr;
    value = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size()) {
      throw std::invalid_argument("invalid " + std::string(what) + ": '" + buf + "'");
    }
  } else {
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("invalid " + std::string(what) + ": '" +
                                  std::string(token) + "'");
    }
  }
  return value;
}

}  // namespace

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs)
    : probs_(std::move(probs)) {
  validate(probs_);
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> probs,
                                           std::vector<Symbol> labels)
    : probs_(std::move(probs)), labels_(std::move(labels)) {
  validate(probs_);
  if (!labels_.empty() && labels_.size() != probs_.size()) {
    throw std::invalid_argument("labels must match probabilities in length");
  }
}

std::size_t DiscreteDistribution::support_size() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(probs_.begin(), probs_.end(), [](double p) { return p > 0.0; }));
}

DiscreteDistribution DiscreteDistribution::from_weights(
    std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("weights must be finite and >= 0");
    }
    total += w;
  }
  if (!(total > 0.0)) throw std::invalid_argument("weights sum to zero");
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& p : probs) p /= total;
  // Push the rounding residue into the largest entry so the sum is exact to
  // the last ulp or two.
  const double residue = 1.0 - std::accumulate(probs.begin(), probs.end(), 0.0);
  *std::max_element(probs.begin(), probs.end()) += residue;
  return DiscreteDistribution(std::move(probs));
}

std::string to_string(const PropertyKind& kind) {
  struct Visitor {
    std::string operator()(const Entropy&) const { return "entropy"; }
    std::string operator()(const SupportSize&) const { return "support"; }
    std::string operator()(const SupportCoverage& c) const {
      return "coverage:" + std::to_string(c.m);
    }
    std::string operator()(const DistanceToUniform& d) const {
      return "dtu:" + std::to_string(d.k);
    }
  };
  return std::visit(Visitor{}, kind);
}

PropertyKind parse_property(std::string_view text) {
  const auto parts = split(text, ':');
  const auto name = parts.front();
  if (name == "entropy" && parts.size() == 1) return Entropy{};
  if (name == "support" && parts.size() == 1) return SupportSize{};
  if (name == "coverage" && parts.size() == 2) {
    const auto m = parse_number<std::uint64_t>(parts[1], "coverage horizon");
    if (m == 0) throw std::invalid_argument("coverage horizon m must be >= 1");
    return SupportCoverage{m};
  }
  if (name == "dtu" && parts.size() == 2) {
    const auto k = parse_number<std::uint64_t>(parts[1], "alphabet size");
    if (k == 0) throw std::invalid_argument("alphabet size k must be >= 1");
    return DistanceToUniform{k};
  }
  throw std::invalid_argument("unknown property '" + std::string(text) + "'");
}

DiscreteDistribution make_uniform(std::size_t k) {
  if (k == 0) throw std::invalid_argument("uniform: k must be >= 1");
  return DiscreteDistribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

DiscreteDistribution make_zipf(std::size_t k, double s) {
  if (k == 0) throw std::invalid_argument("zipf: k must be >= 1");
  if (!(s >= 0.0)) throw std::invalid_argument("zipf: exponent must be >= 0");
  std::vector<double> weights(k);
  for (std::size_t i = 0; i < k; ++i) {
    weights[i] = std::pow(static_cast<double>(i + 1), -s);
  }
  return DiscreteDistribution::from_weights(weights);
}

DiscreteDistribution make_twostep(std::size_t k, double ratio) {
  if (k < 2) throw std::invalid_argument("twostep: k must be >= 2");
  if (!(ratio > 0.0)) throw std::invalid_argument("twostep: ratio must be > 0");
  std::vector<double> weights(k, 1.0);
  std::fill(weights.begin(), weights.begin() + static_cast<std::ptrdiff_t>(k / 2), ratio);
  return DiscreteDistribution::from_weights(weights);
}

DiscreteDistribution make_point_mass(std::size_t k, Symbol at) {
  if (at >= k) throw std::invalid_argument("point mass outside the alphabet");
  std::vector<double> probs(k, 0.0);
  probs[at] = 1.0;
  return DiscreteDistribution(std::move(probs));
}

DiscreteDistribution parse_distribution(std::string_view spec) {
  const auto parts = split(spec, ':');
  const auto family = parts.front();
  if (family == "uniform" && parts.size() == 2) {
    return make_uniform(parse_number<std::size_t>(parts[1], "k"));
  }
  if (family == "zipf" && parts.size() == 3) {
    return make_zipf(parse_number<std::size_t>(parts[1], "k"),
                     parse_number<double>(parts[2], "exponent"));
  }
  if (family == "twostep" && parts.size() == 3) {
    return make_twostep(parse_number<std::size_t>(parts[1], "k"),
                        parse_number<double>(parts[2], "ratio"));
  }
  if (family == "point" && parts.size() == 2) {
    return make_point_mass(parse_number<std::size_t>(parts[1], "k"));
  }
  throw std::invalid_argument("unknown distribution spec '" + std::string(spec) +
                              "' (expected uniform:k, zipf:k:s or twostep:k:ratio)");
}

Sample sample(const DiscreteDistribution& dist, std::size_t n, std::uint64_t seed) {
  const auto probs = dist.probs();
  std::vector<double> cdf(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cdf.begin());
  // Only symbols with positive mass may be drawn, even if the running sum
  // falls short of 1 by rounding.
  const auto last_positive = static_cast<std::size_t>(
      std::find_if(probs.rbegin(), probs.rend(), [](double p) { return p > 0.0; }).base() -
      probs.begin() - 1);

  std::mt19937_64 rng(seed);
  Sample out(n);
  for (auto& x : out) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    auto idx = static_cast<std::size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    idx = std::min(idx, last_positive);
    x = static_cast<Symbol>(idx);
  }
  return out;
}

double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs) {
    if (p > 0.0) h -= p * std::log(p);
  }
  return h;
}

double support_coverage(std::span<const double> probs, std::uint64_t m) {
  if (m == 0) throw std::invalid_argument("support coverage needs m >= 1");
  const double dm = static_cast<double>(m);
  double total = 0.0;
  for (double p : probs) {
    if (p <= 0.0) continue;
    total += p >= 1.0 ? 1.0 : -std::expm1(dm * std::log1p(-p));
  }
  return total;
}

double distance_to_uniform(std::span<const double> probs, std::uint64_t k) {
  if (k == 0) throw std::invalid_argument("distance to uniform needs k >= 1");
  if (probs.size() > k) {
    for (std::size_t i = k; i < probs.size(); ++i) {
      if (probs[i] > 0.0) {
        throw std::invalid_argument("distribution has mass outside the reference alphabet");
      }
    }
  }
  const double u = 1.0 / static_cast<double>(k);
  double total = 0.0;
  const std::size_t shared = std::min<std::size_t>(probs.size(), k);
  for (std::size_t i = 0; i < shared; ++i) total += std::abs(probs[i] - u);
  total += static_cast<double>(k - shared) * u;
  return total;
}

double true_property(std::span<const double> probs, const PropertyKind& kind) {
  struct Visitor {
    std::span<const double> probs;
    double operator()(const Entropy&) const { return entropy(probs); }
    double operator()(const SupportSize&) const {
      return static_cast<double>(
          std::count_if(probs.begin(), probs.end(), [](double p) { return p > 0.0; }));
    }
    double operator()(const SupportCoverage& c) const {
      return support_coverage(probs, c.m);
    }
    double operator()(const DistanceToUniform& d) const {
      return distance_to_uniform(probs, d.k);
    }
  };
  return std::visit(Visitor{probs}, kind);
}

double true_property(const DiscreteDistribution& dist, const PropertyKind& kind) {
  return true_property(dist.probs(), kind);
}

DiscreteDistribution empirical_distribution(std::span<const Symbol> samples) {
  if (samples.empty()) throw std::invalid_argument("empty sample");
  const Symbol top = *std::max_element(samples.begin(), samples.end());
  std::vector<double> counts(static_cast<std::size_t>(top) + 1, 0.0);
  for (Symbol x : samples) counts[x] += 1.0;
  return DiscreteDistribution::from_weights(counts);
}

std::vector<Sample> read_samples(std::istream& in) {
  std::vector<Sample> sequences;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream tokens(line);
    std::string token;
    Sample seq;
    while (tokens >> token) {
      Symbol value{};
      const auto* first = token.data();
      const auto* last = token.data() + token.size();
      auto [ptr, ec] = std::from_chars(first, last, value);
      if (ec != std::errc{} || ptr != last) {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected a nonnegative integer symbol, got '" +
                                 token + "'");
      }
      seq.push_back(value);
    }
    if (!seq.empty()) sequences.push_back(std::move(seq));
  }
  return sequences;
}

void write_samples(std::ostream& out, std::span<const Sample> sequences) {
  for (const auto& seq : sequences) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      if (i) out << ' ';
      out << seq[i];
    }
    out << '\n';
  }
}

}  // namespace symprop
