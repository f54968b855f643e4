#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the profile DP.

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <vector>

#include "symprop/profiles.hpp"

namespace oracle {

// Probability of every profile of length n, by walking all k^n sequences.
inline std::map<symprop::Profile, double> brute_force_profiles(std::span<const double> probs,
                                                               unsigned n) {
  const std::size_t k = probs.size();
  std::map<symprop::Profile, double> out;
  std::vector<std::size_t> seq(n, 0);
  std::vector<std::uint32_t> counts(k);
  while (true) {
    std::fill(counts.begin(), counts.end(), 0);
    double p = 1.0;
    for (auto x : seq) {
      ++counts[x];
      p *= probs[x];
    }
    std::vector<std::uint32_t> mult;
    for (auto c : counts) {
      if (c > 0) mult.push_back(c);
    }
    out[symprop::Profile(mult)] += p;
    std::size_t pos = 0;
    while (pos < n && ++seq[pos] == k) seq[pos++] = 0;
    if (pos == n) break;
  }
  return out;
}

// n!/prod mu_j! / prod_mu phi_mu! * sum over ordered injections of the parts
// into symbols of prod p(x_j)^mu_j.
inline double injection_probability(std::span<const double> probs, const symprop::Profile& phi) {
  const auto mult = phi.multiplicities();
  const std::size_t parts = mult.size();
  const std::size_t k = probs.size();
  if (parts > k) return 0.0;
  double log_coeff = std::lgamma(static_cast<double>(phi.n()) + 1.0);
  for (auto m : mult) log_coeff -= std::lgamma(m + 1.0);
  for (const auto& [mu, count] : symprop::prevalence(phi)) log_coeff -= std::lgamma(count + 1.0);
  std::vector<bool> used(k, false);
  std::function<double(std::size_t)> rec = [&](std::size_t j) -> double {
    if (j == parts) return 1.0;
    double total = 0.0;
    for (std::size_t x = 0; x < k; ++x) {
      if (used[x]) continue;
      used[x] = true;
      total += std::pow(probs[x], mult[j]) * rec(j + 1);
      used[x] = false;
    }
    return total;
  };
  return std::exp(log_coeff) * rec(0);
}

// Partition numbers by the coin-change recurrence over part sizes.
inline std::vector<std::uint64_t> partition_numbers(unsigned n_max) {
  std::vector<std::uint64_t> p(n_max + 1, 0);
  p[0] = 1;
  for (unsigned part = 1; part <= n_max; ++part) {
    for (unsigned total = part; total <= n_max; ++total) p[total] += p[total - part];
  }
  return p;
}

// All distributions on a 1/res simplex grid with exactly k entries.
inline std::vector<std::vector<double>> simplex_grid(unsigned k, unsigned res) {
  std::vector<std::vector<double>> out;
  std::vector<unsigned> cur;
  std::function<void(unsigned)> rec = [&](unsigned remaining) {
    if (cur.size() + 1 == k) {
      cur.push_back(remaining);
      std::vector<double> p;
      for (auto c : cur) p.push_back(static_cast<double>(c) / res);
      out.push_back(p);
      cur.pop_back();
      return;
    }
    for (unsigned c = 0; c <= remaining; ++c) {
      cur.push_back(c);
      rec(remaining - c);
      cur.pop_back();
    }
  };
  rec(res);
  return out;
}

inline double binomial_pmf(unsigned n, unsigned c, double p) {
  double coeff = std::exp(std::lgamma(n + 1.0) - std::lgamma(c + 1.0) - std::lgamma(n - c + 1.0));
  return coeff * std::pow(p, c) * std::pow(1.0 - p, n - c);
}

}  // namespace oracle
