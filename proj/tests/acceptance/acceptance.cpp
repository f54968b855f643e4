// Acceptance run: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "symprop/distributions.hpp"
#include "symprop/estimators.hpp"
#include "symprop/harness.hpp"
#include "symprop/parallel.hpp"
#include "symprop/pml_solver.hpp"
#include "symprop/poly_approx.hpp"
#include "symprop/profiles.hpp"

using namespace symprop;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double tv_to_uniform(const DiscreteDistribution& d, std::size_t m) {
  double tv = 0.0;
  for (std::size_t i = 0; i < std::max(d.alphabet_size(), m); ++i) {
    const double p = i < d.alphabet_size() ? d[i] : 0.0;
    tv += std::abs(p - (i < m ? 1.0 / m : 0.0));
  }
  return 0.5 * tv;
}

Outcome profile_oracle() {
  double worst_rel = 0.0;
  double worst_sum = 0.0;
  std::size_t checked = 0;
  for (unsigned k = 1; k <= 3; ++k) {
    for (const auto& p : oracle::simplex_grid(k, 8)) {
      for (unsigned n = 1; n <= 6; ++n) {
        const auto brute = oracle::brute_force_profiles(p, n);
        double total = 0.0;
        for (const auto& phi : enumerate_profiles(n)) {
          const double closed = profile_probability(p, phi);
          const auto it = brute.find(phi);
          const double ref = it == brute.end() ? 0.0 : it->second;
          const double rel = ref == 0.0 ? std::abs(closed) : std::abs(closed - ref) / ref;
          worst_rel = std::max(worst_rel, rel);
          total += closed;
          ++checked;
        }
        worst_sum = std::max(worst_sum, std::abs(total - 1.0));
      }
    }
  }
  return {worst_rel <= 1e-12 && worst_sum <= 1e-10,
          fmt("%zu (p, phi) pairs, max rel err %.2e, max |sum - 1| %.2e", checked, worst_rel,
              worst_sum)};
}

Outcome partition_counts() {
  const std::vector<std::size_t> expected{1, 2, 3, 5, 7, 11, 15, 22};
  const auto oracle_counts = oracle::partition_numbers(40);
  bool ok = true;
  for (unsigned n = 1; n <= 8; ++n) {
    const auto c = enumerate_profiles(n).size();
    ok = ok && c == expected[n - 1] && c == oracle_counts[n];
  }
  double worst_ratio = 0.0;
  for (unsigned n = 1; n <= 40; ++n) {
    const auto c = enumerate_profiles(n).size();
    ok = ok && c == oracle_counts[n];
    worst_ratio = std::max(worst_ratio, static_cast<double>(c) / std::exp(3.0 * std::sqrt(n)));
  }
  return {ok && worst_ratio <= 1.0,
          fmt("|Phi^40| = %zu, max |Phi^n| / exp(3 sqrt n) = %.3e", enumerate_profiles(40).size(),
              worst_ratio)};
}

Outcome pml_ground_truth() {
  const Profile a({1, 2});
  const Profile b({1, 1, 2});
  const auto ra = pml_optimize(a, default_support_range(a), 50, 1);
  const auto rb = pml_optimize(b, default_support_range(b), 50, 1);
  const bool ok = std::abs(ra.likelihood() - 0.75) <= 1e-6 && tv_to_uniform(ra.dist, 2) < 1e-3 &&
                  std::abs(rb.likelihood() - 0.576) <= 1e-6 && tv_to_uniform(rb.dist, 5) < 1e-3;
  return {ok, fmt("{1,2}: support %zu, p = %.8f; {1,1,2}: support %zu, p = %.8f",
                  ra.dist.support_size(), ra.likelihood(), rb.dist.support_size(),
                  rb.likelihood())};
}

Outcome metatheorem() {
  const auto report = verify_ml_metatheorem({});
  double worst_slack = INFINITY;
  std::size_t guarded = 0;
  for (const auto& row : report.rows) {
    worst_slack = std::min(worst_slack, row.bound - row.plugin_failure);
    guarded += row.guarded_profiles;
  }
  return {report.all_hold && report.profile_count == 11 &&
              report.max_probability_discrepancy <= 1e-12,
          fmt("%zu rows, |Phi^6| = %zu, min bound slack %.3f, %zu guarded profiles, 0 violations "
              "required",
              report.rows.size(), report.profile_count, worst_slack, guarded)};
}

Outcome falling_factorial() {
  double worst = 0.0;
  for (unsigned n = 1; n <= 12; ++n) {
    for (unsigned L = 0; L <= std::min(6u, n); ++L) {
      std::vector<std::vector<double>> bases;
      std::vector<double> b(L + 1);
      for (unsigned i = 0; i <= L; ++i) b[i] = std::cos(1.0 + i) * (i + 1);
      bases.push_back(b);
      if (L >= 1) bases.push_back(best_poly_approx(NegYLogY{}, {0.0, 1.0}, L).coeffs);
      for (const auto& coeffs : bases) {
        for (int pi = 0; pi <= 10; ++pi) {
          const double p = pi / 10.0;
          double expectation = 0.0;
          for (unsigned c = 0; c <= n; ++c) {
            expectation += oracle::binomial_pmf(n, c, p) * falling_factorial_estimate(coeffs, c, n);
          }
          double poly = 0.0;
          for (std::size_t i = coeffs.size(); i-- > 0;) poly = poly * p + coeffs[i];
          worst = std::max(worst, std::abs(expectation - poly));
        }
      }
    }
  }
  return {worst <= 1e-10, fmt("max |E G - sum b_i p^i| = %.2e", worst)};
}

Outcome sml_ceiling() {
  ExperimentConfig cfg;
  cfg.dist_spec = "uniform:2000";
  cfg.n_grid = {1000};
  cfg.trials = 50;
  const auto report = run_experiment(cfg);
  double max_est = 0.0;
  bool ok = report.records.size() == 50;
  for (const auto& r : report.records) {
    ok = ok && r.ok() && r.estimate <= std::log(1000.0);
    max_est = std::max(max_est, r.estimate);
  }
  return {ok, fmt("max estimate %.6f <= log 1000 = %.6f", max_est, std::log(1000.0))};
}

Outcome dominance() {
  const std::size_t k = 5000;
  const auto half = static_cast<std::uint64_t>(std::ceil(k / std::log(static_cast<double>(k))));
  bool ok = true;
  std::string detail = fmt("n = %llu;", static_cast<unsigned long long>(2 * half));
  for (const char* dist : {"uniform:5000", "zipf:5000:1"}) {
    ExperimentConfig cfg;
    cfg.dist_spec = dist;
    cfg.n_grid = {2 * half};
    cfg.trials = 100;
    cfg.estimators = {EstimatorId::Sml, EstimatorId::Poly};
    cfg.mode = EstimatorMode::Performance;
    cfg.k = k;
    cfg.master_seed = 7;
    const auto report = run_experiment(cfg);
    const auto& sml = report.aggregate(EstimatorId::Sml, 2 * half);
    const auto& poly = report.aggregate(EstimatorId::Poly, 2 * half);
    ok = ok && poly.failed_trials == 0 && sml.failed_trials == 0 && poly.mae < sml.mae;
    detail += fmt(" %s MAE poly %.4f vs sml %.4f;", dist, poly.mae, sml.mae);
  }
  return {ok, detail};
}

Outcome good_toulmin() {
  double worst_ratio = 0.0;
  for (double r : {0.5, 1.0, 2.0}) {
    for (double t : {1.0, 2.0, 3.0}) {
      const double bound = 1.0 + std::exp(r * (t - 1.0));
      for (std::uint64_t i = 1; i <= 200; ++i) {
        worst_ratio = std::max(worst_ratio, std::abs(good_toulmin_coefficient(i, t, r)) / bound);
      }
    }
  }
  const auto dist = make_uniform(1000);
  const std::uint64_t m = 1000;
  const double truth = support_coverage(dist.probs(), m) / static_cast<double>(m);
  auto cfg = EstimatorConfig::paper();
  cfg.r_override = std::log(3.0);
  const std::size_t trials = 200;
  std::size_t within = 0;
  double abs_sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto xs = sample(dist, 500, derive_seed(8, t));
    const double err = std::abs(support_coverage_estimate(xs, m, cfg) / m - truth);
    abs_sum += err;
    if (err <= 1.0 / 3.0) ++within;
  }
  const double frac = static_cast<double>(within) / static_cast<double>(trials);
  return {worst_ratio <= 1.0 && frac >= 0.9,
          fmt("max |coef| / bound = %.4f; %zu/200 trials within 1/3 (MAE %.4f)", worst_ratio,
              within, abs_sum / trials)};
}

Outcome dtu_point_mass() {
  const std::uint64_t n = 10000;
  const std::uint64_t k = 1000;
  const Sample xs(2 * n, 0);
  const auto cfg = EstimatorConfig::performance();
  const UniformitySplitEstimator est(n, k, cfg);
  const double value = dtu_estimate(SplitSample(xs), k, cfg);
  const double expected = 2.0 * (1.0 - 1.0 / static_cast<double>(k));
  return {est.case_two() && std::abs(value - expected) <= 1e-9,
          fmt("case %d, estimate %.12f, expected %.12f", est.case_two() ? 2 : 1, value, expected)};
}

Outcome probe() {
  const std::uint64_t n = 10000;
  const std::uint64_t k = 1000;
  const auto cfg = EstimatorConfig::paper();
  const EntropySplitEstimator est(n, k, cfg);
  const auto xs = sample(make_uniform(k), 2 * n, 10);
  const auto r = split_swap_probe(est, SplitSample(xs));
  const double bound = est.bounded_difference_bound();
  return {r.exhaustive && r.max_change <= bound,
          fmt("%llu distinct (half, from, to) swaps, max change %.3e <= bound %.3e (degree %u)",
              static_cast<unsigned long long>(r.evaluated), r.max_change, bound,
              est.polynomial().degree)};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.dist_spec = "zipf:500:1";
  cfg.n_grid = {200, 1000};
  cfg.trials = 20;
  cfg.estimators = {EstimatorId::Sml, EstimatorId::Poly, EstimatorId::Pml};
  cfg.mode = EstimatorMode::Performance;
  cfg.pml_restarts = 2;
  cfg.master_seed = 2024;
  auto csv = [&](unsigned threads) {
    cfg.threads = threads;
    std::ostringstream out;
    write_csv(out, run_experiment(cfg));
    return out.str();
  };
  const std::string a = csv(1);
  const std::string b = csv(1);
  const std::string c = csv(4);
  return {!a.empty() && a == b && a == c,
          fmt("%zu bytes, identical across 2 runs and 1 vs 4 threads", a.size())};
}

struct Criterion {
  int id;
  const char* name;
  double limit_seconds;  // 0: none
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "profile probability matches brute force", 30, profile_oracle},
      {2, "partition counts", 1, partition_counts},
      {3, "PML ground truth", 10, pml_ground_truth},
      {4, "ML meta-theorem exhaustive check", 120, metatheorem},
      {5, "falling-factorial unbiasedness", 5, falling_factorial},
      {6, "SML entropy ceiling", 10, sml_ceiling},
      {7, "poly entropy beats SML", 180, dominance},
      {8, "smoothed Good-Toulmin", 60, good_toulmin},
      {9, "DTU point mass", 5, dtu_point_mass},
      {10, "bounded-difference probe", 120, probe},
      {11, "CSV determinism", 0, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.limit_seconds == 0 || secs < c.limit_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::string limit = c.limit_seconds == 0 ? "" : fmt(" / %.0f s", c.limit_seconds);
    std::printf("%s %2d %s (%.2f s%s): %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs,
                limit.c_str(), o.detail.c_str(), in_time ? "" : " [over time limit]");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed;
}
