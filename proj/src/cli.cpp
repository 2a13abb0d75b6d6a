#include "pcbayes/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "pcbayes/estimator.hpp"
#include "pcbayes/fixtures.hpp"
#include "pcbayes/gibbs.hpp"
#include "pcbayes/io.hpp"
#include "pcbayes/random.hpp"
#include "pcbayes/reconcile.hpp"
#include "pcbayes/risk.hpp"

namespace pcbayes::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<Count> kSizeGrid{50, 100, 200, 500, 1000, 2000};
const std::vector<Count> kFixedSizes{50, 100, 200};

struct PriorFlags {
  std::string name = "uniform";
  std::vector<double> alpha;

  DirichletPrior build(std::size_t k) const {
    if (!alpha.empty()) {
      if (alpha.size() != k) {
        throw Error(ErrorCode::DimensionMismatch, "--alpha has " + std::to_string(alpha.size()) +
                                                      " entries, expected k=" + std::to_string(k));
      }
      return DirichletPrior(alpha);
    }
    if (name == "uniform") return DirichletPrior::uniform(k);
    if (name == "jeffreys") return DirichletPrior::jeffreys(k);
    const std::string prefix = "symmetric=";
    if (name.rfind(prefix, 0) == 0) {
      double a = 0.0;
      try {
        a = std::stod(name.substr(prefix.size()));
      } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidArgument, "bad --prior '" + name + "'");
      }
      return DirichletPrior::symmetric(k, a);
    }
    throw Error(ErrorCode::InvalidArgument,
                "unknown --prior '" + name + "' (uniform, jeffreys or symmetric=<a>)");
  }

  std::string describe() const { return alpha.empty() ? name : "alpha"; }
};

void add_prior_flags(CLI::App* cmd, PriorFlags& flags, const std::string& default_name) {
  flags.name = default_name;
  cmd->add_option("--prior", flags.name, "uniform, jeffreys or symmetric=<a>")
      ->capture_default_str();
  cmd->add_option("--alpha", flags.alpha, "explicit Dirichlet parameters (overrides --prior)")
      ->delimiter(',');
}

struct GibbsFlags {
  std::size_t iterations;
  std::size_t burn_in;
  std::size_t thin = 1;

  GibbsConfig build(std::uint64_t seed) const {
    GibbsConfig config;
    config.iterations = iterations;
    config.burn_in = burn_in;
    config.thin = thin;
    config.seed = seed;
    config.store_draws = false;
    return config;
  }
};

void add_gibbs_flags(CLI::App* cmd, GibbsFlags& flags, const std::string& prefix) {
  cmd->add_option("--" + prefix + "iterations", flags.iterations, "Gibbs iterations per chain")
      ->capture_default_str();
  cmd->add_option("--" + prefix + "burn-in", flags.burn_in, "Gibbs burn-in iterations")
      ->capture_default_str();
  cmd->add_option("--" + prefix + "thin", flags.thin, "Gibbs thinning interval")
      ->capture_default_str();
}

json gibbs_json(const GibbsFlags& flags) {
  return {{"iterations", flags.iterations}, {"burn_in", flags.burn_in}, {"thin", flags.thin}};
}

std::string format_real(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

/// Common manifest written next to every command's outputs.
void write_manifest(const fs::path& dir, const std::string& command,
                    const std::vector<std::string>& args, std::uint64_t seed,
                    std::size_t threads, json inputs, json parameters,
                    const std::vector<std::string>& outputs) {
  json doc;
  doc["tool"] = "pcbayes";
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["argv"] = args;
  doc["seed"] = seed;
  doc["threads"] = threads;
  doc["rng"] = "xoshiro256** seeded through splitmix64";
  doc["compiler"] = __VERSION__;
  doc["inputs"] = std::move(inputs);
  doc["parameters"] = std::move(parameters);
  doc["outputs"] = outputs;
  io::write_text(dir / "manifest.json", doc.dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateArgs {
  std::string x_path;
  std::string y_path;
  std::string scheme_path;
  std::string sampler = "auto";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  PriorFlags prior;
  GibbsFlags gibbs{20000, 5000};
};

int cmd_estimate(const EstimateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const CountTable x = io::read_count_table(a.x_path);
  const std::size_t k = x.columns();
  if (k < 2) throw Error(ErrorCode::InvalidArgument, a.x_path + ": need at least 2 categories");
  const DirichletPrior prior = a.prior.build(k);

  io::RealTable theta{x.row_labels, x.column_labels, {}};
  io::RealTable mc_se{x.row_labels, x.column_labels, {}};
  std::string method = "full_only";
  json inputs = {{"x", a.x_path}};

  if (a.y_path.empty()) {
    for (const auto& row : x.counts) theta.values.push_back(bayes_full_only(row, prior).values());
  } else {
    if (a.scheme_path.empty()) throw Error(ErrorCode::InvalidArgument, "--y requires --scheme");
    const io::SchemeFile file = io::read_scheme_json(a.scheme_path);
    if (file.k != k) {
      throw Error(ErrorCode::SchemeMismatch, "scheme has k=" + std::to_string(file.k) + " but " +
                                                 a.x_path + " has " + std::to_string(k) +
                                                 " columns");
    }
    const AggregationScheme scheme = file.scheme();
    const CountTable y = io::read_count_table(a.y_path);
    inputs["y"] = a.y_path;
    inputs["scheme"] = a.scheme_path;
    if (y.columns() != scheme.group_count()) {
      throw Error(ErrorCode::SchemeMismatch,
                  a.y_path + " has " + std::to_string(y.columns()) + " columns but the scheme has " +
                      std::to_string(scheme.group_count()) + " groups" +
                      (scheme.has_implicit_complement() ? " (including the complement group first)"
                                                        : ""));
    }
    if (y.rows() != x.rows()) {
      throw Error(ErrorCode::RowMismatch, "x and y have different numbers of rows");
    }
    bool use_gibbs = scheme.overlapping();
    if (a.sampler == "gibbs") use_gibbs = true;
    else if (a.sampler == "closed") scheme.require_disjoint("closed-form estimation");
    else if (a.sampler != "auto") throw Error(ErrorCode::InvalidArgument, "unknown --sampler " + a.sampler);

    method = use_gibbs ? "gibbs" : "closed_form";
    theta.values.resize(x.rows());
    mc_se.values.resize(x.rows());
    for (std::size_t r = 0; r < x.rows(); ++r) {
      if (use_gibbs) {
        PosteriorDraws draws = gibbs_posterior(x.counts[r], y.counts[r], scheme, prior,
                                               a.gibbs.build(random::derive_seed(a.seed, r)));
        theta.values[r] = draws.mean.values();
        mc_se.values[r] = draws.mc_se;
      } else {
        theta.values[r] = bayes_with_partial(x.counts[r], y.counts[r], scheme, prior).values();
      }
    }
  }

  const fs::path dir(a.out_dir);
  std::vector<std::string> outputs{"theta.csv"};
  io::write_real_table(dir / "theta.csv", theta);
  if (method == "gibbs") {
    io::write_real_table(dir / "mc_se.csv", mc_se);
    outputs.push_back("mc_se.csv");
  }
  json params = {{"method", method}, {"prior", a.prior.describe()}, {"alpha", prior.alpha()}};
  if (method == "gibbs") params["gibbs"] = gibbs_json(a.gibbs);
  write_manifest(dir, "estimate", args, a.seed, a.threads, inputs, params, outputs);
  out << "estimate: " << x.rows() << " row(s), method " << method << ", wrote "
      << (dir / "theta.csv").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
  std::string setting;
  std::string scheme_path;
  std::vector<double> theta;
  std::vector<std::string> fix;
  std::vector<Count> N;
  std::vector<Count> N_prime;
  std::string risk;
  std::string estimator;
  std::vector<std::size_t> reporting;
  std::size_t replications = kDefaultReplications;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  PriorFlags prior;
  GibbsFlags gibbs{1000, 200};
};

struct Preset {
  std::size_t k;
  std::vector<Group> groups;  // 0-based, A_0 first
  bool bayes_default;
};

Preset preset(const std::string& id) {
  if (id == "i") return {3, {{0}, {1, 2}}, false};
  if (id == "ii") return {9, {{0, 1, 2, 3}, {4, 5, 6, 7, 8}}, false};
  if (id == "iii") return {3, {{0, 1}, {1, 2}}, true};
  if (id == "iv") return {9, {{0, 1, 2, 3, 4}, {4, 5, 6, 7, 8}}, true};
  throw Error(ErrorCode::InvalidArgument, "unknown --setting '" + id + "' (i, ii, iii or iv)");
}

Count parse_size(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  long long v = -1;
  try {
    v = std::stoll(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || v < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad " + what + " '" + text + "'");
  }
  return static_cast<Count>(v);
}

std::vector<std::pair<Count, Count>> size_grid(const SimulateArgs& a) {
  std::optional<Count> fixed_n, fixed_np;
  for (const auto& f : a.fix) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--fix expects N=<n> or Nprime=<n>");
    const std::string key = f.substr(0, eq);
    const Count value = parse_size(f.substr(eq + 1), "--fix value");
    if (key == "N") fixed_n = value;
    else if (key == "Nprime" || key == "N_prime" || key == "N'") fixed_np = value;
    else throw Error(ErrorCode::InvalidArgument, "--fix key must be N or Nprime, got '" + key + "'");
  }
  for (Count v : a.N) if (v < 0) throw Error(ErrorCode::InvalidArgument, "--N values must be >= 0");
  for (Count v : a.N_prime) if (v < 0) throw Error(ErrorCode::InvalidArgument, "--Nprime values must be >= 0");
  if (fixed_n && !a.N.empty()) throw Error(ErrorCode::InvalidArgument, "use either --fix N=.. or --N");
  if (fixed_np && !a.N_prime.empty()) throw Error(ErrorCode::InvalidArgument, "use either --fix Nprime=.. or --Nprime");

  std::vector<std::pair<Count, Count>> grid;
  const bool any = fixed_n || fixed_np || !a.N.empty() || !a.N_prime.empty();
  if (!any) {
    // N sweep at fixed N' and N' sweep at fixed N.
    for (Count n : kFixedSizes) for (Count np : kSizeGrid) grid.emplace_back(n, np);
    for (Count np : kFixedSizes) for (Count n : kSizeGrid) grid.emplace_back(n, np);
  } else {
    const std::vector<Count> ns = fixed_n ? std::vector<Count>{*fixed_n} : (a.N.empty() ? kSizeGrid : a.N);
    const std::vector<Count> nps =
        fixed_np ? std::vector<Count>{*fixed_np} : (a.N_prime.empty() ? kSizeGrid : a.N_prime);
    for (Count n : ns) for (Count np : nps) grid.emplace_back(n, np);
  }
  std::vector<std::pair<Count, Count>> unique;
  std::set<std::pair<Count, Count>> seen;
  for (const auto& p : grid) if (seen.insert(p).second) unique.push_back(p);
  return unique;
}

int cmd_simulate(const SimulateArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  if (a.replications < kMinReplications) {
    throw Error(ErrorCode::InvalidArgument, "--replications must be at least " +
                                                std::to_string(kMinReplications));
  }
  if (a.setting.empty() == a.scheme_path.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give exactly one of --setting or --scheme");
  }

  std::string setting_id = a.setting.empty() ? "custom" : a.setting;
  std::optional<AggregationScheme> scheme;
  std::vector<double> theta = a.theta;
  bool bayes = false;
  std::optional<std::vector<std::size_t>> reporting;
  json inputs = json::object();
  if (!a.setting.empty()) {
    const Preset p = preset(a.setting);
    scheme = AggregationScheme::validate(p.groups, p.k);
    if (theta.empty()) theta.assign(p.k, 1.0 / static_cast<double>(p.k));
    bayes = p.bayes_default;
  } else {
    const io::SchemeFile file = io::read_scheme_json(a.scheme_path);
    scheme = file.scheme();
    reporting = file.reporting;
    inputs["scheme"] = a.scheme_path;
  }
  const std::size_t k = scheme->k();
  if (!a.reporting.empty()) {
    std::vector<std::size_t> map;
    for (std::size_t j : a.reporting) {
      if (j < 1) throw Error(ErrorCode::IndexOutOfRange, "--reporting groups are 1-based");
      map.push_back(j - 1);
    }
    reporting = std::move(map);
  }
  if (!a.risk.empty()) {
    if (a.risk == "bayes") bayes = true;
    else if (a.risk == "frequentist") bayes = false;
    else throw Error(ErrorCode::InvalidArgument, "--risk must be frequentist or bayes");
  }
  if (!bayes && theta.empty()) throw Error(ErrorCode::InvalidArgument, "--theta is required for frequentist risk");

  const DirichletPrior prior = a.prior.build(k);
  EstimatorKind kind = scheme->overlapping() ? EstimatorKind::WithPartialGibbs
                                             : EstimatorKind::WithPartialClosed;
  if (!a.estimator.empty()) kind = parse_estimator_kind(a.estimator);

  std::optional<ReportingMap> map;
  if (scheme->overlapping()) {
    map = reporting ? ReportingMap::from_groups(*scheme, *reporting)
                    : ReportingMap::lowest_index(*scheme);
  }

  RiskOptions options;
  options.threads = a.threads;
  options.gibbs = a.gibbs.build(0);

  const auto grid = size_grid(a);
  std::ostringstream csv;
  csv << "setting_id,N,N_prime,estimator,risk,se,delta,delta_se,dominance_flag,"
         "risk_type,risk_full_only,se_full_only\n";
  for (const auto& [n, np] : grid) {
    RiskReport report;
    if (bayes) {
      report = bayes_risk({*scheme, prior, n, np, a.replications, a.seed, map}, kind, options);
    } else {
      report = simulate_risk({*scheme, prior, ProbabilityVector(theta), n, np, a.replications,
                              a.seed, map},
                             kind, options);
    }
    csv << setting_id << ',' << n << ',' << np << ',' << to_string(kind) << ','
        << format_real(report.risk_hat.value) << ',' << format_real(report.risk_hat.se) << ','
        << format_real(report.delta.value) << ',' << format_real(report.delta.se) << ','
        << (report.dominance_flag ? "true" : "false") << ','
        << (bayes ? "bayes" : "frequentist") << ',' << format_real(report.risk_tilde.value)
        << ',' << format_real(report.risk_tilde.se) << '\n';
    out << "N=" << n << " N'=" << np << " delta=" << report.delta.value << " (se "
        << report.delta.se << ")\n";
  }

  const fs::path dir(a.out_dir);
  io::write_text(dir / "risk_curves.csv", csv.str());
  json params = {{"setting_id", setting_id},
                 {"risk_type", bayes ? "bayes" : "frequentist"},
                 {"estimator", to_string(kind)},
                 {"replications", a.replications},
                 {"prior", a.prior.describe()},
                 {"alpha", prior.alpha()},
                 {"grid", grid}};
  if (!bayes) params["theta"] = theta;
  if (map) params["reporting"] = map->groups();
  if (kind == EstimatorKind::WithPartialGibbs) params["gibbs"] = gibbs_json(a.gibbs);
  json groups = json::array();
  for (const auto& g : scheme->groups()) {
    json group = json::array();
    for (Index i : g) group.push_back(i + 1);
    groups.push_back(group);
  }
  params["groups"] = groups;
  write_manifest(dir, "simulate", args, a.seed, a.threads, inputs, params, {"risk_curves.csv"});
  return kExitOk;
}

// ---------------------------------------------------------------------------
// reconcile

struct ReconcileArgs {
  std::string reference_path;
  std::string aggregated_path;
  std::string scheme_path;
  std::string truth_path;
  std::string baseline;
  std::string mode = "expected";
  std::string sampler = "auto";
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  PriorFlags prior;
  GibbsFlags gibbs{20000, 5000};
};

std::size_t parse_baseline(const std::string& text) {
  const std::string prefix = "seeds=";
  const std::string value = text.rfind(prefix, 0) == 0 ? text.substr(prefix.size()) : text;
  const Count n = parse_size(value, "--baseline");
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "--baseline needs at least one seed");
  return static_cast<std::size_t>(n);
}

int cmd_reconcile(const ReconcileArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  const CountTable reference = io::read_count_table(a.reference_path);
  const CountTable aggregated = io::read_count_table(a.aggregated_path);
  const io::SchemeFile file = io::read_scheme_json(a.scheme_path);
  const AggregationScheme scheme = file.scheme();
  const DirichletPrior prior = a.prior.build(scheme.k());

  ReconcileOptions options;
  if (a.mode == "expected") options.mode = AllocationMode::Expected;
  else if (a.mode == "stochastic") options.mode = AllocationMode::Stochastic;
  else throw Error(ErrorCode::InvalidArgument, "--mode must be expected or stochastic");
  if (a.sampler == "auto") options.sampler = SamplerKind::Auto;
  else if (a.sampler == "closed") options.sampler = SamplerKind::ClosedForm;
  else if (a.sampler == "gibbs") options.sampler = SamplerKind::Gibbs;
  else throw Error(ErrorCode::InvalidArgument, "--sampler must be auto, closed or gibbs");
  options.seed = a.seed;
  options.threads = a.threads;
  options.gibbs = a.gibbs.build(a.seed);

  ReconcileResult result = disaggregate_table(reference, aggregated, scheme, prior, options);

  json report;
  report["sampler"] = to_string(result.sampler_used);
  report["mode"] = a.mode;
  report["scheme_overlapping"] = scheme.overlapping();
  report["warnings"] = result.warnings;
  report["total"] = result.predicted.total();
  json inputs = {{"reference", a.reference_path},
                 {"aggregated", a.aggregated_path},
                 {"scheme", a.scheme_path}};
  std::optional<CountTable> truth;
  if (!a.truth_path.empty()) {
    truth = io::read_count_table(a.truth_path);
    inputs["truth"] = a.truth_path;
    result.accuracy = table_accuracy(result.predicted, *truth);
    report["bayes_accuracy"] = *result.accuracy;
  }
  if (!a.baseline.empty()) {
    if (!truth) throw Error(ErrorCode::InvalidArgument, "--baseline requires --truth");
    const std::size_t seeds = parse_baseline(a.baseline);
    const McEstimate base = baseline_accuracy(aggregated, *truth, scheme, seeds,
                                              random::derive_seed(a.seed, 0xba5e));
    result.baseline_accuracy = base.value;
    report["baseline_accuracy"] = base.value;
    report["baseline_se"] = base.se;
    report["baseline_seeds"] = seeds;
    report["margin"] = *result.accuracy - base.value;
  }

  const fs::path dir(a.out_dir);
  io::write_count_table(dir / "predicted.csv", result.predicted);
  io::RealTable theta{reference.row_labels, reference.column_labels, {}};
  for (const auto& p : result.posterior_theta) theta.values.push_back(p.values());
  io::write_real_table(dir / "posterior_theta.csv", theta);
  io::write_text(dir / "report.json", report.dump(2) + "\n");

  json params = {{"mode", a.mode},
                 {"sampler", to_string(result.sampler_used)},
                 {"prior", a.prior.describe()},
                 {"alpha", prior.alpha()}};
  if (result.sampler_used == SamplerKind::Gibbs) params["gibbs"] = gibbs_json(a.gibbs);
  if (!a.baseline.empty()) params["baseline_seeds"] = parse_baseline(a.baseline);
  write_manifest(dir, "reconcile", args, a.seed, a.threads, inputs, params,
                 {"predicted.csv", "posterior_theta.csv", "report.json"});

  for (const auto& w : result.warnings) out << "warning: " << w << "\n";
  out << "reconcile: sampler " << to_string(result.sampler_used);
  if (result.accuracy) out << ", accuracy " << *result.accuracy;
  if (result.baseline_accuracy) out << ", baseline " << *result.baseline_accuracy;
  out << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------------------
// fixture

struct FixtureArgs {
  std::string name;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
};

int cmd_fixture(const FixtureArgs& a, const std::vector<std::string>& args, std::ostream& out) {
  fixtures::ReconcileFixture f = a.name == "mchss"  ? fixtures::mchss_split_fixture(a.seed)
                                 : a.name == "bdhs" ? fixtures::bdhs_split_fixture(a.seed)
                                                    : throw Error(ErrorCode::InvalidArgument,
                                                                  "--name must be mchss or bdhs");
  const fs::path dir(a.out_dir);
  io::write_count_table(dir / "reference.csv", f.reference);
  io::write_count_table(dir / "truth.csv", f.truth);
  io::write_count_table(dir / "aggregated.csv", f.aggregated);
  io::write_scheme_json(dir / "scheme.json", f.scheme_file);
  io::write_count_table(dir / "full.csv", a.name == "mchss" ? fixtures::mchss_1996_2005()
                                                            : fixtures::bdhs_2011());
  json params = {{"name", a.name}, {"split_fraction", fixtures::kSplitFraction}};
  if (a.name == "bdhs") params["early_share"] = fixtures::kBdhsEarlyShare;
  write_manifest(dir, "fixture", args, a.seed, 1, json::object(), params,
                 {"reference.csv", "truth.csv", "aggregated.csv", "scheme.json", "full.csv"});
  out << "fixture " << a.name << ": wrote " << dir.string() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian estimation of multinomial probabilities from fully and partially "
               "classified counts"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "posterior mean of theta per row of x");
  estimate->add_option("--x", est.x_path, "fully classified counts (CSV)")->required();
  estimate->add_option("--y", est.y_path, "aggregated counts (CSV), one column per group");
  estimate->add_option("--scheme", est.scheme_path, "aggregation scheme (JSON)");
  estimate->add_option("--sampler", est.sampler, "auto, closed or gibbs")->capture_default_str();
  estimate->add_option("--out", est.out_dir, "output directory")->capture_default_str();
  estimate->add_option("--seed", est.seed, "base seed")->capture_default_str();
  estimate->add_option("--threads", est.threads, "worker threads")->capture_default_str();
  add_prior_flags(estimate, est.prior, "uniform");
  add_gibbs_flags(estimate, est.gibbs, "");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo KL risk curves");
  simulate->add_option("--setting", sim.setting, "preset i, ii, iii or iv");
  simulate->add_option("--scheme", sim.scheme_path, "custom aggregation scheme (JSON)");
  simulate->add_option("--theta", sim.theta, "true theta")->delimiter(',');
  simulate->add_option("--fix", sim.fix, "N=<n> or Nprime=<n>");
  simulate->add_option("--N", sim.N, "fully classified sample sizes")->delimiter(',');
  simulate->add_option("--Nprime", sim.N_prime, "aggregated sample sizes")->delimiter(',');
  simulate->add_option("--risk", sim.risk, "frequentist or bayes");
  simulate->add_option("--estimator", sim.estimator, "closed, gibbs or full_only");
  simulate->add_option("--reporting", sim.reporting,
                       "1-based reporting group per category (overlapping schemes)")
      ->delimiter(',');
  simulate->add_option("--replications", sim.replications, "Monte Carlo replications")
      ->capture_default_str();
  simulate->add_option("--out", sim.out_dir, "output directory")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "base seed")->capture_default_str();
  simulate->add_option("--threads", sim.threads, "worker threads")->capture_default_str();
  add_prior_flags(simulate, sim.prior, "jeffreys");
  add_gibbs_flags(simulate, sim.gibbs, "gibbs-");

  ReconcileArgs rec;
  auto* reconcile = app.add_subcommand("reconcile", "disaggregate a cause-by-group table");
  reconcile->add_option("--reference", rec.reference_path, "fully classified table (CSV)")->required();
  reconcile->add_option("--aggregated", rec.aggregated_path, "aggregated table (CSV)")->required();
  reconcile->add_option("--scheme", rec.scheme_path, "aggregation scheme (JSON)")->required();
  reconcile->add_option("--truth", rec.truth_path, "true fine table for accuracy (CSV)");
  reconcile->add_option("--baseline", rec.baseline, "seeds=<n>: random-assignment baseline");
  reconcile->add_option("--mode", rec.mode, "expected or stochastic")->capture_default_str();
  reconcile->add_option("--sampler", rec.sampler, "auto, closed or gibbs")->capture_default_str();
  reconcile->add_option("--out", rec.out_dir, "output directory")->capture_default_str();
  reconcile->add_option("--seed", rec.seed, "base seed")->capture_default_str();
  reconcile->add_option("--threads", rec.threads, "worker threads")->capture_default_str();
  add_prior_flags(reconcile, rec.prior, "uniform");
  add_gibbs_flags(reconcile, rec.gibbs, "");

  FixtureArgs fix;
  auto* fixture = app.add_subcommand("fixture", "write a reference/target split of a shipped table");
  fixture->add_option("--name", fix.name, "mchss or bdhs")->required();
  fixture->add_option("--out", fix.out_dir, "output directory")->capture_default_str();
  fixture->add_option("--seed", fix.seed, "split seed")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*estimate) return cmd_estimate(est, args, out);
    if (*simulate) return cmd_simulate(sim, args, out);
    if (*reconcile) return cmd_reconcile(rec, args, out);
    if (*fixture) return cmd_fixture(fix, args, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.is_numeric() ? kExitNumeric : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace pcbayes::cli
