#include "symprop/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "symprop/parallel.hpp"
#include "symprop/pml_solver.hpp"

namespace symprop {

namespace {

using Json = nlohmann::ordered_json;

constexpr double kBoundSlack = 1e-12;

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::uint64_t estimator_tag(EstimatorId id) { return static_cast<std::uint64_t>(id) + 1; }

// Scale on which estimates and truth are compared.
double normalizer(const PropertyKind& kind, std::uint64_t k) {
  if (std::holds_alternative<SupportSize>(kind)) return static_cast<double>(k);
  if (const auto* cov = std::get_if<SupportCoverage>(&kind)) return static_cast<double>(cov->m);
  return 1.0;
}

std::uint64_t alphabet_bound(const ExperimentConfig& cfg, const DiscreteDistribution& dist) {
  if (cfg.k) return *cfg.k;
  if (const auto* dtu = std::get_if<DistanceToUniform>(&cfg.property)) return dtu->k;
  return dist.alphabet_size();
}

Json config_to_json(const ExperimentConfig& cfg) {
  Json j;
  j["dist"] = cfg.dist_spec;
  j["property"] = to_string(cfg.property);
  j["n_grid"] = cfg.n_grid;
  j["trials"] = cfg.trials;
  Json names = Json::array();
  for (auto id : cfg.estimators) names.push_back(std::string(to_string(id)));
  j["estimators"] = names;
  j["master_seed"] = cfg.master_seed;
  j["epsilon"] = cfg.epsilon;
  j["mode"] = std::string(to_string(cfg.mode));
  if (cfg.k) j["k"] = *cfg.k;
  j["pml_restarts"] = cfg.pml_restarts;
  j["threads"] = cfg.threads;
  return j;
}

}  // namespace

std::string_view to_string(EstimatorId id) {
  switch (id) {
    case EstimatorId::Sml: return "sml";
    case EstimatorId::Poly: return "poly";
    case EstimatorId::Pml: return "pml";
    case EstimatorId::Gt: return "gt";
  }
  return "?";
}

EstimatorId parse_estimator(std::string_view text) {
  if (text == "sml") return EstimatorId::Sml;
  if (text == "poly") return EstimatorId::Poly;
  if (text == "pml") return EstimatorId::Pml;
  if (text == "gt") return EstimatorId::Gt;
  throw std::invalid_argument("unknown estimator '" + std::string(text) +
                              "' (expected sml, poly, pml or gt)");
}

bool supports(EstimatorId id, const PropertyKind& kind) {
  switch (id) {
    case EstimatorId::Sml:
    case EstimatorId::Pml: return true;
    case EstimatorId::Poly:
      return std::holds_alternative<Entropy>(kind) ||
             std::holds_alternative<DistanceToUniform>(kind);
    case EstimatorId::Gt:
      return std::holds_alternative<SupportSize>(kind) ||
             std::holds_alternative<SupportCoverage>(kind);
  }
  return false;
}

void ExperimentConfig::validate() const {
  if (trials == 0) throw std::invalid_argument("trials must be >= 1");
  if (n_grid.empty()) throw std::invalid_argument("n_grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] == 0) throw std::invalid_argument("n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw std::invalid_argument("n_grid must be strictly increasing");
    }
  }
  if (estimators.empty()) throw std::invalid_argument("no estimators selected");
  std::set<EstimatorId> seen;
  for (auto id : estimators) {
    if (!seen.insert(id).second) {
      throw std::invalid_argument("estimator '" + std::string(to_string(id)) + "' listed twice");
    }
    if (!supports(id, property)) {
      throw std::invalid_argument("estimator '" + std::string(to_string(id)) +
                                  "' does not estimate " + to_string(property));
    }
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
  if (k && *k == 0) throw std::invalid_argument("k must be >= 1");
  if (const auto* cov = std::get_if<SupportCoverage>(&property); cov && cov->m == 0) {
    throw std::invalid_argument("coverage horizon m must be >= 1");
  }
  if (pml_restarts == 0) throw std::invalid_argument("pml_restarts must be >= 1");
  (void)parse_distribution(dist_spec);
}

ExperimentConfig parse_experiment_config(std::string_view json_text) {
  Json j;
  try {
    j = Json::parse(json_text);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  static const std::set<std::string> known{"dist",   "property", "n_grid",       "trials",
                                           "estimators", "master_seed", "epsilon", "mode",
                                           "k",      "pml_restarts", "threads"};
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw std::invalid_argument("unknown config key '" + key + "'");
  }
  for (const char* key : {"dist", "property", "n_grid"}) {
    if (!j.contains(key)) throw std::invalid_argument(std::string("config lacks '") + key + "'");
  }
  ExperimentConfig cfg;
  try {
    cfg.dist_spec = j.at("dist").get<std::string>();
    cfg.property = parse_property(j.at("property").get<std::string>());
    cfg.n_grid = j.at("n_grid").get<std::vector<std::uint64_t>>();
    if (j.contains("trials")) cfg.trials = j.at("trials").get<unsigned>();
    if (j.contains("estimators")) {
      cfg.estimators.clear();
      for (const auto& name : j.at("estimators")) {
        cfg.estimators.push_back(parse_estimator(name.get<std::string>()));
      }
    }
    if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("epsilon")) cfg.epsilon = j.at("epsilon").get<double>();
    if (j.contains("mode")) cfg.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("k")) cfg.k = j.at("k").get<std::uint64_t>();
    if (j.contains("pml_restarts")) cfg.pml_restarts = j.at("pml_restarts").get<unsigned>();
    if (j.contains("threads")) cfg.threads = j.at("threads").get<unsigned>();
  } catch (const Json::exception& e) {
    throw std::invalid_argument(std::string("bad config value: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_experiment_config(text.str());
}

std::string experiment_config_json(const ExperimentConfig& cfg) {
  return config_to_json(cfg).dump(2);
}

const AggregateRow& ExperimentReport::aggregate(EstimatorId id, std::uint64_t n) const {
  for (const auto& row : aggregates) {
    if (row.estimator == id && row.n == n) return row;
  }
  throw std::out_of_range("no aggregate for that estimator and n");
}

std::uint64_t trial_seed(std::uint64_t master_seed, EstimatorId id, std::uint64_t n,
                         unsigned trial) {
  return derive_seed(master_seed, estimator_tag(id), n, trial);
}

double run_estimator(EstimatorId id, const ExperimentConfig& cfg, std::span<const Symbol> samples,
                     std::uint64_t seed) {
  const auto dist = parse_distribution(cfg.dist_spec);
  const std::uint64_t k = alphabet_bound(cfg, dist);
  const double scale = normalizer(cfg.property, k);
  const auto est_cfg = EstimatorConfig::for_mode(cfg.mode, cfg.epsilon);
  switch (id) {
    case EstimatorId::Sml:
      if (std::holds_alternative<SupportSize>(cfg.property)) {
        std::vector<Symbol> sorted(samples.begin(), samples.end());
        std::sort(sorted.begin(), sorted.end());
        const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
        return static_cast<double>(distinct) / scale;
      }
      return sml_plugin(samples, cfg.property) / scale;
    case EstimatorId::Poly: {
      const SplitSample split(samples);
      if (const auto* dtu = std::get_if<DistanceToUniform>(&cfg.property)) {
        return dtu_estimate(split, dtu->k, est_cfg);
      }
      return entropy_estimate(split, k, est_cfg);
    }
    case EstimatorId::Pml: {
      PmlSettings settings;
      settings.restarts = cfg.pml_restarts;
      settings.seed = seed;
      return pml_plugin(samples, cfg.property, settings) / scale;
    }
    case EstimatorId::Gt:
      if (const auto* cov = std::get_if<SupportCoverage>(&cfg.property)) {
        return support_coverage_estimate(samples, cov->m, est_cfg) / scale;
      }
      return support_estimate(samples, k, cfg.epsilon);
  }
  throw std::logic_error("unhandled estimator");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto dist = parse_distribution(cfg.dist_spec);
  const std::uint64_t k = alphabet_bound(cfg, dist);

  ExperimentReport report;
  report.config = cfg;
  report.truth = true_property(dist, cfg.property) / normalizer(cfg.property, k);

  const std::size_t per_estimator = cfg.n_grid.size() * cfg.trials;
  const std::size_t total = cfg.estimators.size() * per_estimator;
  report.records.resize(total);
  std::vector<double> seconds(total, 0.0);

  parallel_for(total, cfg.threads, [&](std::size_t idx) {
    const auto id = cfg.estimators[idx / per_estimator];
    const std::uint64_t n = cfg.n_grid[(idx % per_estimator) / cfg.trials];
    const auto trial = static_cast<unsigned>(idx % cfg.trials);
    TrialRecord& rec = report.records[idx];
    rec.estimator = id;
    rec.n = n;
    rec.trial = trial;
    rec.seed = trial_seed(cfg.master_seed, id, n, trial);
    rec.truth = report.truth;
    const auto start = std::chrono::steady_clock::now();
    try {
      const Sample xs = sample(dist, n, rec.seed);
      rec.estimate = run_estimator(id, cfg, xs, rec.seed);
      rec.abs_error = std::abs(rec.estimate - rec.truth);
    } catch (const std::exception& e) {
      rec.status = std::string("failed: ") + e.what();
      rec.estimate = 0.0;
      rec.abs_error = 0.0;
    }
    seconds[idx] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  });

  for (std::size_t e = 0; e < cfg.estimators.size(); ++e) {
    for (std::size_t g = 0; g < cfg.n_grid.size(); ++g) {
      AggregateRow row;
      row.estimator = cfg.estimators[e];
      row.n = cfg.n_grid[g];
      double abs_sum = 0.0;
      double sq_sum = 0.0;
      unsigned exceed = 0;
      for (unsigned t = 0; t < cfg.trials; ++t) {
        const std::size_t idx = e * per_estimator + g * cfg.trials + t;
        const auto& rec = report.records[idx];
        row.runtime_seconds += seconds[idx];
        if (!rec.ok()) {
          ++row.failed_trials;
          continue;
        }
        ++row.ok_trials;
        abs_sum += rec.abs_error;
        sq_sum += rec.abs_error * rec.abs_error;
        if (rec.abs_error > cfg.epsilon) ++exceed;
      }
      if (row.ok_trials > 0) {
        const double count = row.ok_trials;
        row.mae = abs_sum / count;
        row.rmse = std::sqrt(sq_sum / count);
        row.prob_exceed = exceed / count;
      }
      report.aggregates.push_back(row);
    }
  }
  return report;
}

void write_csv(std::ostream& out, const ExperimentReport& report) {
  const std::string property = to_string(report.config.property);
  out << "estimator,property,dist,n,trial,estimate,truth,abs_error,seed,status\n";
  for (const auto& rec : report.records) {
    out << to_string(rec.estimator) << ',' << property << ',' << report.config.dist_spec << ','
        << rec.n << ',' << rec.trial << ',';
    if (rec.ok()) out << format_real(rec.estimate);
    out << ',' << format_real(rec.truth) << ',';
    if (rec.ok()) out << format_real(rec.abs_error);
    std::string status = rec.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out << ',' << rec.seed << ',' << status << '\n';
  }
}

std::string experiment_report_json(const ExperimentReport& report, bool timing) {
  Json j;
  j["config"] = config_to_json(report.config);
  j["truth"] = report.truth;
  Json aggregates = Json::array();
  for (const auto& row : report.aggregates) {
    Json a;
    a["estimator"] = std::string(to_string(row.estimator));
    a["n"] = row.n;
    a["ok_trials"] = row.ok_trials;
    a["failed_trials"] = row.failed_trials;
    a["mae"] = row.mae;
    a["rmse"] = row.rmse;
    a["prob_exceed"] = row.prob_exceed;
    if (timing) a["runtime_seconds"] = row.runtime_seconds;
    aggregates.push_back(a);
  }
  j["aggregates"] = aggregates;
  Json trials = Json::array();
  for (const auto& rec : report.records) {
    Json t;
    t["estimator"] = std::string(to_string(rec.estimator));
    t["n"] = rec.n;
    t["trial"] = rec.trial;
    t["seed"] = rec.seed;
    if (rec.ok()) {
      t["estimate"] = rec.estimate;
      t["abs_error"] = rec.abs_error;
    }
    t["status"] = rec.status;
    trials.push_back(t);
  }
  j["trials"] = trials;
  return j.dump(2);
}

ProbeResult bounded_difference_probe(const SampleEstimator& estimator,
                                     std::span<const Symbol> samples, std::size_t positions,
                                     std::span<const Symbol> alphabet, std::uint64_t seed) {
  if (samples.empty()) throw std::invalid_argument("probe needs a nonempty sample");
  ProbeResult out;
  positions = std::min(positions, samples.size());
  if (positions == 0 || alphabet.empty()) {
    out.exhaustive = true;
    return out;
  }
  const double base = estimator(samples);
  Sample work(samples.begin(), samples.end());
  auto probe = [&](std::size_t pos, Symbol replacement) {
    const Symbol original = work[pos];
    if (replacement == original) return;
    work[pos] = replacement;
    out.max_change = std::max(out.max_change, std::abs(estimator(work) - base));
    work[pos] = original;
    ++out.evaluated;
  };
  const std::size_t pairs = positions * alphabet.size();
  if (pairs <= kProbeBudget) {
    out.exhaustive = positions == samples.size();
    for (std::size_t pos = 0; pos < positions; ++pos) {
      for (Symbol b : alphabet) probe(pos, b);
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  for (std::size_t draw = 0; draw < kProbeBudget; ++draw) {
    const std::size_t pair = rng() % pairs;
    probe(pair / alphabet.size(), alphabet[pair % alphabet.size()]);
  }
  return out;
}

ProbeResult split_swap_probe(const SplitEstimator& estimator, const SplitSample& split) {
  if (split.n() != estimator.n()) {
    throw std::invalid_argument("split sample length does not match estimator");
  }
  const std::uint64_t k = estimator.k();
  std::vector<std::uint64_t> first(k, 0);
  std::vector<std::uint64_t> second(k, 0);
  for (const auto& c : split.counts()) {
    if (c.symbol >= k) throw std::invalid_argument("sample symbol outside the alphabet");
    first[c.symbol] = c.first;
    second[c.symbol] = c.second;
  }
  std::vector<double> term(k);
  double raw = 0.0;
  for (std::uint64_t x = 0; x < k; ++x) {
    term[x] = estimator.contribution(first[x], second[x]);
    raw += term[x];
  }
  const double base = estimator.clamp(raw);

  ProbeResult out;
  out.exhaustive = true;
  std::vector<double> gain(k);
  for (int half = 0; half < 2; ++half) {
    auto& counts = half == 0 ? first : second;
    const auto& other = half == 0 ? second : first;
    auto term_with = [&](std::uint64_t x, std::uint64_t c) {
      return half == 0 ? estimator.contribution(c, other[x]) : estimator.contribution(other[x], c);
    };
    for (std::uint64_t b = 0; b < k; ++b) gain[b] = term_with(b, counts[b] + 1) - term[b];
    for (std::uint64_t a = 0; a < k; ++a) {
      if (counts[a] == 0) continue;
      const double loss = term_with(a, counts[a] - 1) - term[a];
      for (std::uint64_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double change = std::abs(estimator.clamp(raw + loss + gain[b]) - base);
        out.max_change = std::max(out.max_change, change);
        ++out.evaluated;
      }
    }
  }
  return out;
}

namespace {

// Probability of each profile under (q, 1 - q), by walking all 2^n sequences.
std::vector<double> enumerate_binary_profiles(double q, std::uint32_t n,
                                              const std::map<Profile, std::size_t>& index) {
  std::vector<double> out(index.size(), 0.0);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    const auto ones = static_cast<std::uint32_t>(std::popcount(mask));
    double p = 1.0;
    for (std::uint32_t i = 0; i < n; ++i) p *= ((mask >> i) & 1U) ? q : 1.0 - q;
    std::vector<std::uint32_t> mult;
    if (ones > 0) mult.push_back(ones);
    if (ones < n) mult.push_back(n - ones);
    out[index.at(Profile(mult))] += p;
  }
  return out;
}

double binary_entropy(double q) { return entropy(std::vector<double>{q, 1.0 - q}); }

}  // namespace

MetaTheoremReport verify_ml_metatheorem(const MetaTheoremSettings& settings) {
  const std::uint32_t n = settings.n;
  if (n < 1 || n > kMaxTinyPmlSampleSize) {
    throw std::invalid_argument("meta-theorem check supports 1 <= n <= 10");
  }
  if (!(settings.grid_step > 0.0 && settings.grid_step <= 0.5)) {
    throw std::invalid_argument("grid step must lie in (0, 0.5]");
  }
  const double cells = std::round(1.0 / settings.grid_step);
  if (std::abs(cells * settings.grid_step - 1.0) > 1e-9) {
    throw std::invalid_argument("grid step must divide 1");
  }
  for (double beta : settings.betas) {
    if (!(beta > 0.0 && beta <= 1.0)) throw std::invalid_argument("beta must lie in (0, 1]");
  }
  for (double eps : settings.epsilons) {
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  }

  MetaTheoremReport report;
  report.n = n;
  const auto profiles = enumerate_profiles(n);
  const std::size_t P = profiles.size();
  report.profile_count = P;
  std::map<Profile, std::size_t> index;
  for (std::size_t i = 0; i < P; ++i) index.emplace(profiles[i], i);

  const auto G = static_cast<std::size_t>(cells) + 1;
  for (std::size_t g = 0; g < G; ++g) report.grid.push_back(static_cast<double>(g) / cells);

  std::vector<std::vector<double>> prob(G, std::vector<double>(P));
  std::vector<std::vector<double>> brute(G);
  std::vector<double> f(G);
  for (std::size_t g = 0; g < G; ++g) {
    const double q = report.grid[g];
    const std::vector<double> probs{q, 1.0 - q};
    for (std::size_t i = 0; i < P; ++i) prob[g][i] = profile_probability(probs, profiles[i]);
    brute[g] = enumerate_binary_profiles(q, n, index);
    for (std::size_t i = 0; i < P; ++i) {
      report.max_probability_discrepancy =
          std::max(report.max_probability_discrepancy, std::abs(prob[g][i] - brute[g][i]));
    }
    f[g] = binary_entropy(q);
  }

  if (settings.reference) {
    if (settings.reference->size() != P) {
      throw std::invalid_argument("reference table needs one value per profile");
    }
    report.reference = *settings.reference;
  } else {
    report.reference.assign(P, 0.0);
    for (std::size_t i = 0; i < P; ++i) {
      if (profiles[i].parts() > 2) continue;
      report.reference[i] = entropy(pml_exact_tiny(profiles[i], 2).dist.probs());
    }
  }

  // p_phi: grid maximizer of p(phi).
  std::vector<std::size_t> ml(P, 0);
  for (std::size_t i = 0; i < P; ++i) {
    for (std::size_t g = 1; g < G; ++g) {
      if (prob[g][i] > prob[ml[i]][i]) ml[i] = g;
    }
  }

  const double Z = static_cast<double>(P);
  for (double eps : settings.epsilons) {
    std::vector<double> ref_fail(G, 0.0);
    double delta = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
      double via_brute = 0.0;
      for (std::size_t i = 0; i < P; ++i) {
        if (std::abs(f[g] - report.reference[i]) > eps) {
          ref_fail[g] += prob[g][i];
          via_brute += brute[g][i];
        }
      }
      report.max_failure_discrepancy =
          std::max(report.max_failure_discrepancy, std::abs(ref_fail[g] - via_brute));
      report.max_failure_mass = std::max(report.max_failure_mass, ref_fail[g]);
      delta = std::max(delta, ref_fail[g]);
    }
    report.delta.push_back(delta);

    for (double beta : settings.betas) {
      // fails[g][i]: some admissible candidate for phi_i is more than 2 eps off at p_g.
      for (std::size_t g = 0; g < G; ++g) {
        MetaTheoremRow row;
        row.epsilon = eps;
        row.beta = beta;
        row.q = report.grid[g];
        row.reference_failure = ref_fail[g];
        row.bound = delta * Z / beta;
        double via_brute = 0.0;
        for (std::size_t i = 0; i < P; ++i) {
          const double floor = beta * prob[ml[i]][i];
          bool fails = std::abs(f[g] - f[ml[i]]) > 2.0 * eps;
          for (std::size_t c = 0; c < G && !fails; ++c) {
            if (prob[c][i] >= floor && std::abs(f[g] - f[c]) > 2.0 * eps) fails = true;
          }
          const bool guarded = prob[g][i] > delta / beta;
          row.guarded_profiles += guarded ? 1 : 0;
          if (fails) {
            row.plugin_failure += prob[g][i];
            via_brute += brute[g][i];
            row.guarded_failures += guarded ? 1 : 0;
          }
        }
        report.max_failure_discrepancy =
            std::max(report.max_failure_discrepancy, std::abs(row.plugin_failure - via_brute));
        report.max_failure_mass = std::max(report.max_failure_mass, row.plugin_failure);
        row.holds = row.plugin_failure <= row.bound + kBoundSlack && row.guarded_failures == 0;
        report.all_hold = report.all_hold && row.holds;
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

std::string metatheorem_report_json(const MetaTheoremReport& report) {
  Json j;
  j["n"] = report.n;
  j["profile_count"] = report.profile_count;
  j["all_hold"] = report.all_hold;
  j["max_probability_discrepancy"] = report.max_probability_discrepancy;
  j["max_failure_discrepancy"] = report.max_failure_discrepancy;
  j["max_failure_mass"] = report.max_failure_mass;
  j["reference"] = report.reference;
  j["delta"] = report.delta;
  Json rows = Json::array();
  for (const auto& row : report.rows) {
    Json r;
    r["epsilon"] = row.epsilon;
    r["beta"] = row.beta;
    r["q"] = row.q;
    r["reference_failure"] = row.reference_failure;
    r["plugin_failure"] = row.plugin_failure;
    r["bound"] = row.bound;
    r["guarded_profiles"] = row.guarded_profiles;
    r["guarded_failures"] = row.guarded_failures;
    r["holds"] = row.holds;
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2);
}

}  // namespace symprop
