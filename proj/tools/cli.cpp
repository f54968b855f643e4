#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "symprop/distributions.hpp"
#include "symprop/estimators.hpp"
#include "symprop/harness.hpp"
#include "symprop/parallel.hpp"
#include "symprop/pml_solver.hpp"
#include "symprop/poly_approx.hpp"
#include "symprop/profiles.hpp"

namespace symprop::cli {

namespace {

using Json = nlohmann::ordered_json;

// Bad flag values or combinations; mapped to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

template <typename Fn>
auto as_usage(Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::vector<Sample> read_sample_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input file '" + path + "'");
  auto sequences = read_samples(in);
  if (sequences.empty()) throw std::runtime_error("input file '" + path + "' has no samples");
  return sequences;
}

// Writes to --out when given, else to the command's stdout.
void emit(std::ostream& out, const std::string& path, const std::string& text) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write '" + path + "'");
  file << text;
}

Symbol max_symbol(std::span<const Symbol> xs) { return *std::max_element(xs.begin(), xs.end()); }

struct EstimateArgs {
  std::string property = "entropy";
  std::string estimator;
  std::optional<std::uint64_t> k;
  std::optional<std::uint64_t> m;
  double epsilon = 0.1;
  std::string mode = "paper";
  std::string smoothing = "poisson";
  std::string input;
  std::size_t blocks = 1;
  bool bits = false;
  unsigned restarts = 50;
  std::uint64_t seed = 0;
};

int run_estimate(const EstimateArgs& a, std::ostream& out) {
  const auto cfg_base = as_usage([&] {
    auto c = EstimatorConfig::for_mode(parse_mode(a.mode), a.epsilon);
    if (a.smoothing == "binomial") {
      c.smoothing = Smoothing::Binomial;
    } else if (a.smoothing != "poisson") {
      throw std::invalid_argument("--smoothing must be poisson or binomial");
    }
    c.validate();
    return c;
  });
  if (a.blocks == 0) throw UsageError("--blocks must be >= 1");

  const std::string estimator = !a.estimator.empty()
                                    ? a.estimator
                                    : (a.property == "entropy" || a.property == "dtu" ? "poly" : "gt");
  const EstimatorId id = as_usage([&] { return parse_estimator(estimator); });

  PropertyKind kind;
  if (a.property == "entropy") {
    kind = Entropy{};
  } else if (a.property == "support") {
    if (!a.k) throw UsageError("support needs --k");
    kind = SupportSize{};
  } else if (a.property == "coverage") {
    if (!a.m || *a.m == 0) throw UsageError("coverage needs --m >= 1");
    kind = SupportCoverage{*a.m};
  } else if (a.property == "dtu") {
    if (!a.k || *a.k == 0) throw UsageError("dtu needs --k >= 1");
    kind = DistanceToUniform{*a.k};
  } else {
    throw UsageError("--property must be entropy, support, coverage or dtu");
  }
  if (!supports(id, kind)) {
    throw UsageError("estimator " + estimator + " does not estimate " + a.property);
  }

  const auto sequences = read_sample_file(a.input);
  Json results = Json::array();
  for (const auto& xs : sequences) {
    const std::uint64_t k = a.k.value_or(static_cast<std::uint64_t>(max_symbol(xs)) + 1);
    EstimatorConfig cfg = cfg_base;
    SampleEstimator base;
    switch (id) {
      case EstimatorId::Sml:
        base = [&](std::span<const Symbol> s) {
          if (std::holds_alternative<SupportSize>(kind)) {
            std::vector<Symbol> sorted(s.begin(), s.end());
            std::sort(sorted.begin(), sorted.end());
            const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
            return static_cast<double>(distinct) / static_cast<double>(k);
          }
          return sml_plugin(s, kind);
        };
        break;
      case EstimatorId::Poly:
        base = [&](std::span<const Symbol> s) {
          const SplitSample split(s);
          if (const auto* dtu = std::get_if<DistanceToUniform>(&kind)) {
            return dtu_estimate(split, dtu->k, cfg);
          }
          return entropy_estimate(split, k, cfg);
        };
        break;
      case EstimatorId::Pml:
        base = [&](std::span<const Symbol> s) {
          PmlSettings settings;
          settings.restarts = a.restarts;
          settings.seed = a.seed;
          const double v = pml_plugin(s, kind, settings);
          return std::holds_alternative<SupportSize>(kind) ? v / static_cast<double>(k) : v;
        };
        break;
      case EstimatorId::Gt:
        base = [&](std::span<const Symbol> s) {
          if (const auto* cov = std::get_if<SupportCoverage>(&kind)) {
            return support_coverage_estimate(s, cov->m, cfg);
          }
          return support_estimate(s, k, a.epsilon);
        };
        break;
    }
    double value = a.blocks == 1 ? base(xs) : median_boost(base, xs, a.blocks);
    if (a.bits && std::holds_alternative<Entropy>(kind)) value /= std::numbers::ln2;

    Json used;
    used["property"] = to_string(kind);
    used["estimator"] = estimator;
    used["mode"] = a.mode;
    used["epsilon"] = a.epsilon;
    used["k"] = k;
    if (a.m) used["m"] = *a.m;
    used["blocks"] = a.blocks;
    if (id == EstimatorId::Poly) {
      const std::uint64_t half = xs.size() / a.blocks / 2;
      used["c1"] = cfg.c1;
      used["c2"] = cfg.c2;
      used["alpha"] = cfg.alpha;
      used["degree"] = cfg.degree(half);
    }
    if (id == EstimatorId::Gt) {
      used["r"] = std::holds_alternative<SupportCoverage>(kind) ? cfg.smoothing_mean()
                                                                 : std::log(3.0 / a.epsilon);
      used["smoothing"] = a.smoothing;
    }
    if (id == EstimatorId::Pml) {
      used["restarts"] = a.restarts;
      used["seed"] = a.seed;
    }
    if (std::holds_alternative<SupportSize>(kind)) used["units"] = "fraction of k";
    if (std::holds_alternative<Entropy>(kind)) used["units"] = a.bits ? "bits" : "nats";

    Json r;
    r["estimate"] = value;
    r["n"] = xs.size();
    r["config_used"] = used;
    results.push_back(r);
  }
  out << (results.size() == 1 ? results[0] : results).dump(2) << '\n';
  return kExitOk;
}

struct PmlArgs {
  std::string profile;
  std::string input;
  std::string support;
  unsigned restarts = 50;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool exact = false;
};

int run_pml(const PmlArgs& a, std::ostream& out) {
  if (a.profile.empty() == a.input.empty()) {
    throw UsageError("give exactly one of --profile and --input");
  }
  Profile profile;
  if (!a.profile.empty()) {
    profile = as_usage([&] { return parse_profile(a.profile); });
  } else {
    profile = extract_profile(read_sample_file(a.input).front());
  }
  std::optional<SupportRange> range;
  if (!a.support.empty()) range = as_usage([&] { return parse_support_range(a.support); });

  PmlResult result;
  if (a.exact) {
    const std::size_t max_support =
        range ? range->hi : std::min(default_support_range(profile).hi, kMaxTinyPmlSupport);
    result = as_usage([&] { return pml_exact_tiny(profile, max_support); });
  } else {
    PmlSettings settings;
    settings.support = range;
    settings.restarts = a.restarts;
    settings.seed = a.seed;
    settings.threads = a.threads;
    result = as_usage([&] { return pml_optimize(profile, settings); });
  }

  Json j;
  j["profile"] = format_profile(profile);
  j["support"] = result.dist.support_size();
  std::vector<double> probs(result.dist.probs().begin(), result.dist.probs().end());
  j["probs"] = probs;
  j["log_likelihood"] = result.log_likelihood;
  j["likelihood"] = result.likelihood();
  j["beta_empirical"] = result.beta_empirical;
  j["support_searched"] = std::to_string(result.support_searched.lo) + ".." +
                          std::to_string(result.support_searched.hi);
  Json sizes = Json::array();
  for (const auto& s : result.per_support) {
    sizes.push_back({{"support", s.support},
                     {"log_likelihood", s.log_likelihood},
                     {"beta_empirical", s.beta_empirical}});
  }
  j["per_support"] = sizes;
  if (a.exact) j["grid_certified"] = result.grid_certified;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct PolyArgs {
  std::string target = "neg-ylogy";
  double lo = 0.0;
  double hi = 1.0;
  unsigned degree = 4;
};

int run_polyapprox(const PolyArgs& a, std::ostream& out) {
  const auto approx = as_usage([&] {
    ApproxTarget target;
    if (a.target == "neg-ylogy") {
      target = NegYLogY{};
    } else if (a.target.rfind("abs:", 0) == 0) {
      std::size_t used = 0;
      const std::string c = a.target.substr(4);
      double shift = 0.0;
      try {
        shift = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (c.empty() || used != c.size()) throw std::invalid_argument("bad shift in " + a.target);
      target = AbsShift{shift};
    } else {
      throw std::invalid_argument("--target must be neg-ylogy or abs:c");
    }
    return best_poly_approx(target, {a.lo, a.hi}, a.degree);
  });
  Json j;
  j["target"] = a.target;
  j["degree"] = approx.degree;
  j["interval"] = {approx.interval.lo, approx.interval.hi};
  j["coeffs"] = approx.coeffs;
  j["sup_error"] = approx.sup_error;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct ExperimentArgs {
  std::string config;
  std::string format = "json";
  std::string out_path;
  std::optional<unsigned> threads;
  bool timing = false;
};

int run_experiment_cmd(const ExperimentArgs& a, std::ostream& out) {
  ExperimentConfig cfg = load_experiment_config(a.config);
  if (a.threads) cfg.threads = *a.threads;
  const auto report = run_experiment(cfg);
  if (a.format == "csv") {
    std::ostringstream text;
    write_csv(text, report);
    emit(out, a.out_path, text.str());
  } else {
    emit(out, a.out_path, experiment_report_json(report, a.timing) + "\n");
  }
  return kExitOk;
}

struct VerifyArgs {
  std::uint32_t n = 6;
  std::vector<double> epsilons{0.1, 0.2, 0.4};
  std::vector<double> betas{1.0, 0.5, 0.1};
  double step = 0.05;
  std::string reference;
};

int run_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  MetaTheoremSettings settings;
  settings.n = a.n;
  settings.epsilons = a.epsilons;
  settings.betas = a.betas;
  settings.grid_step = a.step;
  if (!a.reference.empty()) {
    std::ifstream in(a.reference);
    if (!in) throw std::runtime_error("cannot open reference table '" + a.reference + "'");
    try {
      settings.reference = Json::parse(in).get<std::vector<double>>();
    } catch (const Json::exception& e) {
      throw std::runtime_error("reference table must be a JSON array of numbers: " +
                               std::string(e.what()));
    }
  }
  const auto report = as_usage([&] { return verify_ml_metatheorem(settings); });
  out << metatheorem_report_json(report) << '\n';
  if (!report.all_hold) {
    err << "verify: the inequality fails at some grid point\n";
    return kExitRuntime;
  }
  return kExitOk;
}

struct ProbeArgs {
  std::string input;
  std::string estimator = "sml";
  std::string property = "entropy";
  std::uint64_t k = 0;
  std::optional<std::size_t> positions;
  std::uint64_t seed = 0;
  std::string mode = "paper";
};

int run_probe(const ProbeArgs& a, std::ostream& out) {
  if (a.k == 0) throw UsageError("--k must be >= 1");
  const Sample xs = read_sample_file(a.input).front();
  if (max_symbol(xs) >= a.k) throw UsageError("sample has symbols outside {0..k-1}");
  const PropertyKind kind = as_usage([&] { return parse_property(a.property); });

  Json j;
  ProbeResult result;
  if (a.estimator == "poly") {
    const auto cfg = as_usage([&] { return EstimatorConfig::for_mode(parse_mode(a.mode)); });
    const SplitSample split = as_usage([&] { return SplitSample(xs); });
    if (std::holds_alternative<Entropy>(kind)) {
      const EntropySplitEstimator est(split.n(), a.k, cfg);
      result = split_swap_probe(est, split);
      j["bound"] = est.bounded_difference_bound();
    } else if (const auto* dtu = std::get_if<DistanceToUniform>(&kind)) {
      if (dtu->k != a.k) throw UsageError("dtu:k must match --k");
      const UniformitySplitEstimator est(split.n(), a.k, cfg);
      result = split_swap_probe(est, split);
    } else {
      throw UsageError("poly probes entropy or dtu:k");
    }
  } else if (a.estimator == "sml") {
    std::vector<Symbol> alphabet(a.k);
    for (std::uint64_t x = 0; x < a.k; ++x) alphabet[x] = static_cast<Symbol>(x);
    const SampleEstimator est = [&](std::span<const Symbol> s) { return sml_plugin(s, kind); };
    result = bounded_difference_probe(est, xs, a.positions.value_or(xs.size()), alphabet, a.seed);
    if (std::holds_alternative<Entropy>(kind)) {
      const double n = static_cast<double>(xs.size());
      j["bound"] = 2.0 * std::log(n) / n + 2.0 / n;
    }
  } else {
    throw UsageError("--estimator must be sml or poly");
  }
  j["estimator"] = a.estimator;
  j["property"] = to_string(kind);
  j["n"] = xs.size();
  j["max_change"] = result.max_change;
  j["evaluated"] = result.evaluated;
  j["exhaustive"] = result.exhaustive;
  out << j.dump(2) << '\n';
  return kExitOk;
}

struct SampleArgs {
  std::string dist;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string out_path;
};

int run_sample(const SampleArgs& a, std::ostream& out) {
  const auto dist = as_usage([&] { return parse_distribution(a.dist); });
  if (a.n == 0) throw UsageError("--n must be >= 1");
  std::vector<Sample> lines;
  for (std::size_t i = 0; i < a.count; ++i) {
    lines.push_back(sample(dist, a.n, a.count == 1 ? a.seed : derive_seed(a.seed, i)));
  }
  std::ostringstream text;
  write_samples(text, lines);
  emit(out, a.out_path, text.str());
  return kExitOk;
}

}  // namespace

int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Symmetric property estimation: profiles, PML, polynomial and Good-Toulmin "
               "estimators",
               "symprop"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a property from samples");
  estimate->add_option("--property", est.property, "entropy|support|coverage|dtu")
      ->check(CLI::IsMember({"entropy", "support", "coverage", "dtu"}));
  estimate->add_option("--estimator", est.estimator, "sml|poly|pml|gt (default by property)");
  estimate->add_option("--k", est.k, "Alphabet size / support lower-bound parameter");
  estimate->add_option("--m", est.m, "Coverage horizon");
  estimate->add_option("--epsilon", est.epsilon, "Target accuracy");
  estimate->add_option("--mode", est.mode, "paper|performance");
  estimate->add_option("--smoothing", est.smoothing, "poisson|binomial");
  estimate->add_option("--input", est.input, "Sample file, one sequence per line")->required();
  estimate->add_option("--blocks", est.blocks, "Median of this many equal blocks");
  estimate->add_option("--restarts", est.restarts, "PML restarts per support size");
  estimate->add_option("--seed", est.seed, "PML seed");
  estimate->add_flag("--bits", est.bits, "Report entropy in bits");

  PmlArgs pml;
  auto* pml_cmd = app.add_subcommand("pml", "Profile maximum likelihood distribution");
  pml_cmd->add_option("--profile", pml.profile, "Comma-separated multiplicities, e.g. 1,1,2");
  pml_cmd->add_option("--input", pml.input, "Sample file; the first sequence is used");
  pml_cmd->add_option("--support", pml.support, "Support range lo..hi or a single size");
  pml_cmd->add_option("--restarts", pml.restarts, "Dirichlet restarts per support size");
  pml_cmd->add_option("--seed", pml.seed, "Restart seed");
  pml_cmd->add_option("--threads", pml.threads, "Worker threads (0 = auto)");
  pml_cmd->add_flag("--exact", pml.exact, "Grid-certified search (n <= 10, support <= 12)");

  PolyArgs poly;
  auto* poly_cmd = app.add_subcommand("polyapprox", "Best polynomial approximation");
  poly_cmd->add_option("--target", poly.target, "neg-ylogy or abs:c");
  poly_cmd->add_option("--lo", poly.lo, "Interval start");
  poly_cmd->add_option("--hi", poly.hi, "Interval end");
  poly_cmd->add_option("--degree", poly.degree, "Polynomial degree (<= 40)");

  ExperimentArgs exp;
  auto* exp_cmd = app.add_subcommand("experiment", "Run a seeded Monte-Carlo experiment");
  exp_cmd->add_option("--config", exp.config, "JSON experiment config")->required();
  exp_cmd->add_option("--format", exp.format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  exp_cmd->add_option("--out", exp.out_path, "Write the report here instead of stdout");
  exp_cmd->add_option("--threads", exp.threads, "Override the config's thread count");
  exp_cmd->add_flag("--timing", exp.timing, "Include runtimes in JSON output");

  VerifyArgs ver;
  auto* verify = app.add_subcommand("verify", "Exhaustive ML meta-theorem check on k = 2");
  verify->add_option("--n", ver.n, "Sample size");
  verify->add_option("--epsilons", ver.epsilons, "Accuracies")->delimiter(',');
  verify->add_option("--betas", ver.betas, "Approximation factors")->delimiter(',');
  verify->add_option("--step", ver.step, "Probability grid step");
  verify->add_option("--reference", ver.reference, "JSON array of reference estimates");

  ProbeArgs probe;
  auto* probe_cmd = app.add_subcommand("probe", "Single-replacement bounded-difference probe");
  probe_cmd->add_option("--input", probe.input, "Sample file; the first sequence is used")
      ->required();
  probe_cmd->add_option("--estimator", probe.estimator, "sml|poly");
  probe_cmd->add_option("--property", probe.property, "entropy, dtu:k, ...");
  probe_cmd->add_option("--k", probe.k, "Replacement alphabet {0..k-1}")->required();
  probe_cmd->add_option("--positions", probe.positions, "Positions to probe (sml)");
  probe_cmd->add_option("--seed", probe.seed, "Subsampling seed");
  probe_cmd->add_option("--mode", probe.mode, "paper|performance (poly)");

  SampleArgs smp;
  auto* sample_cmd = app.add_subcommand("sample", "Draw seeded samples from a distribution");
  sample_cmd->add_option("--dist", smp.dist, "uniform:k, zipf:k:s, twostep:k:ratio, point:k")
      ->required();
  sample_cmd->add_option("--n", smp.n, "Sample size")->required();
  sample_cmd->add_option("--seed", smp.seed, "Seed");
  sample_cmd->add_option("--count", smp.count, "Number of sequences");
  sample_cmd->add_option("--out", smp.out_path, "Write here instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*estimate) return run_estimate(est, out);
    if (*pml_cmd) return run_pml(pml, out);
    if (*poly_cmd) return run_polyapprox(poly, out);
    if (*exp_cmd) return run_experiment_cmd(exp, out);
    if (*verify) return run_verify(ver, out, err);
    if (*probe_cmd) return run_probe(probe, out);
    if (*sample_cmd) return run_sample(smp, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace symprop::cli
