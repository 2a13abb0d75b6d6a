#include "pcbayes/risk.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pcbayes/estimator.hpp"
#include "pcbayes/parallel.hpp"
#include "pcbayes/random.hpp"

namespace pcbayes {

const char* to_string(EstimatorKind kind) noexcept {
  switch (kind) {
    case EstimatorKind::WithPartialClosed: return "with_partial_closed";
    case EstimatorKind::WithPartialGibbs: return "with_partial_gibbs";
    case EstimatorKind::FullOnly: return "full_only";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(const std::string& name) {
  if (name == "with_partial_closed" || name == "closed") return EstimatorKind::WithPartialClosed;
  if (name == "with_partial_gibbs" || name == "gibbs") return EstimatorKind::WithPartialGibbs;
  if (name == "full_only") return EstimatorKind::FullOnly;
  throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + name + "'");
}

GibbsConfig default_risk_gibbs_config() {
  GibbsConfig config;
  config.iterations = 1000;
  config.burn_in = 200;
  config.thin = 1;
  config.store_draws = false;
  return config;
}

namespace {

struct Experiment {
  const AggregationScheme& scheme;
  const DirichletPrior& prior;
  const ProbabilityVector* fixed_theta;  // null: draw from the prior
  Count N;
  Count N_prime;
  std::size_t replications;
  std::uint64_t seed;
  const std::optional<ReportingMap>& reporting;
};

McEstimate summarize(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = values.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  return {mean, sd / std::sqrt(n)};
}

// Blocks used to generate data: units of category i are reported under
// block_of[i]. For disjoint schemes these are the groups themselves.
struct ReportingBlocks {
  std::vector<std::size_t> block_of;
  std::vector<std::vector<Index>> members;
};

ReportingBlocks make_blocks(const AggregationScheme& scheme, const ReportingMap& map) {
  ReportingBlocks blocks;
  blocks.block_of = map.groups();
  blocks.members.resize(scheme.group_count());
  for (Index i = 0; i < scheme.k(); ++i) blocks.members[map[i]].push_back(i);
  return blocks;
}

void validate_experiment(const Experiment& e, EstimatorKind kind) {
  if (e.replications < kMinReplications) {
    throw Error(ErrorCode::InvalidArgument,
                "replications must be at least " + std::to_string(kMinReplications));
  }
  if (e.N < 0 || e.N_prime < 0) {
    throw Error(ErrorCode::InvalidArgument, "sample sizes must be >= 0");
  }
  if (e.prior.k() != e.scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "prior and scheme disagree on k");
  }
  if (e.fixed_theta) {
    if (e.fixed_theta->size() != e.scheme.k()) {
      throw Error(ErrorCode::DimensionMismatch, "theta and scheme disagree on k");
    }
    if (!e.fixed_theta->strictly_positive()) {
      throw Error(ErrorCode::NonpositiveEntry, "the true theta must be strictly positive");
    }
  }
  if (e.scheme.overlapping()) {
    if (kind == EstimatorKind::WithPartialClosed) e.scheme.require_disjoint("with_partial_closed");
    if (!e.reporting) {
      throw Error(ErrorCode::OverlappingSchemeWithoutReportingMap,
                  "overlapping schemes need a reporting map to generate aggregated data");
    }
  }
}

RiskReport run_experiment(const Experiment& e, EstimatorKind kind, const RiskOptions& options,
                          bool bayes) {
  validate_experiment(e, kind);
  if (kind == EstimatorKind::WithPartialGibbs) options.gibbs.validate(kBatchMeansBatches);

  const ReportingMap map = e.scheme.overlapping() ? *e.reporting : ReportingMap::lowest_index(e.scheme);
  const ReportingBlocks blocks = make_blocks(e.scheme, map);
  const std::size_t k = e.scheme.k();
  const std::size_t block_count = blocks.members.size();

  std::vector<double> loss_hat(e.replications);
  std::vector<double> loss_tilde(e.replications);
  std::vector<double> diff(e.replications);

  parallel_for(e.replications, options.threads, [&](std::size_t r) {
    random::Engine rng = random::make_engine(e.seed, r);

    std::vector<double> theta_buf;
    std::span<const double> theta;
    if (e.fixed_theta) {
      theta = e.fixed_theta->span();
    } else {
      theta_buf.resize(k);
      random::dirichlet(rng, e.prior.alpha(), theta_buf);
      theta = theta_buf;
    }

    std::vector<double> block_mass(block_count, 0.0);
    for (Index i = 0; i < k; ++i) block_mass[blocks.block_of[i]] += theta[i];

    // X: block totals, then the split inside each block.
    CountVector block_x(block_count);
    random::multinomial(rng, e.N, block_mass, block_x);
    CountVector x(k, 0);
    std::vector<double> shares;
    CountVector split;
    for (std::size_t b = 0; b < block_count; ++b) {
      const auto& members = blocks.members[b];
      if (members.empty() || block_x[b] == 0) continue;
      shares.resize(members.size());
      split.resize(members.size());
      for (std::size_t q = 0; q < members.size(); ++q) shares[q] = theta[members[q]];
      random::multinomial(rng, block_x[b], shares, split);
      for (std::size_t q = 0; q < members.size(); ++q) x[members[q]] = split[q];
    }

    // Y: only the reported group totals are observed.
    CountVector y(block_count);
    random::multinomial(rng, e.N_prime, block_mass, y);

    const ProbabilityVector tilde = bayes_full_only(x, e.prior);
    std::vector<double> hat;
    if (e.N_prime == 0 || kind == EstimatorKind::FullOnly) {
      hat = tilde.values();
    } else if (kind == EstimatorKind::WithPartialClosed) {
      hat = bayes_with_partial(x, y, e.scheme, e.prior).values();
    } else {
      GibbsConfig config = options.gibbs;
      config.seed = rng();
      config.store_draws = false;
      hat = gibbs_posterior(x, y, e.scheme, e.prior, config).mean.values();
    }

    loss_hat[r] = kl_loss(hat, theta);
    loss_tilde[r] = kl_loss(tilde.span(), theta);
    diff[r] = loss_hat[r] - loss_tilde[r];
  });

  RiskReport report;
  report.risk_hat = summarize(loss_hat);
  report.risk_tilde = summarize(loss_tilde);
  report.delta = summarize(diff);
  report.dominance_flag = report.delta.value + 2.0 * report.delta.se < 0.0;
  report.replications = e.replications;
  report.estimator = kind;
  report.bayes_risk = bayes;
  return report;
}

std::vector<double> binomial_pmf(Count n, double p) {
  std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
  if (p <= 0.0) {
    pmf.front() = 1.0;
    return pmf;
  }
  if (p >= 1.0) {
    pmf.back() = 1.0;
    return pmf;
  }
  // log-space recurrence; avoids lgamma, which is not thread-safe in glibc.
  const double log_ratio = std::log(p) - std::log1p(-p);
  double log_term = static_cast<double>(n) * std::log1p(-p);
  for (Count x = 0; x <= n; ++x) {
    pmf[static_cast<std::size_t>(x)] = std::exp(log_term);
    log_term += std::log(static_cast<double>(n - x) / static_cast<double>(x + 1)) + log_ratio;
  }
  return pmf;
}

// G on (0, 1]; theta = 1 arises for a single-group scheme.
double g_value(double theta, Count N, double alpha_group) {
  const auto pmf = binomial_pmf(N, theta);
  double expectation = 0.0;
  for (std::size_t x = 0; x < pmf.size(); ++x) {
    const double xd = static_cast<double>(x);
    expectation += pmf[x] * std::log((1.0 + xd + alpha_group) / (xd + alpha_group));
  }
  return theta * theta * expectation;
}

}  // namespace

RiskReport simulate_risk(const SimulationSetting& setting, EstimatorKind estimator,
                         const RiskOptions& options) {
  const Experiment e{setting.scheme, setting.prior, &setting.theta, setting.N,
                     setting.N_prime, setting.replications, setting.seed, setting.reporting};
  return run_experiment(e, estimator, options, false);
}

RiskReport bayes_risk(const BayesRiskSetting& setting, EstimatorKind estimator,
                      const RiskOptions& options) {
  const Experiment e{setting.scheme, setting.prior, nullptr, setting.N,
                     setting.N_prime, setting.replications, setting.seed, setting.reporting};
  return run_experiment(e, estimator, options, true);
}

double exact_risk_difference(const ProbabilityVector& theta, const AggregationScheme& scheme,
                             const DirichletPrior& prior, Count N, Count N_prime) {
  scheme.require_disjoint("exact_risk_difference");
  if (N < 0 || N_prime < 0) throw Error(ErrorCode::InvalidArgument, "sample sizes must be >= 0");
  if (N_prime == 0) return 0.0;
  const auto tau = group_mass(theta.span(), scheme);
  const auto alpha = prior.group_alpha(scheme);
  const double alpha_s = prior.alpha_sum();
  double delta = std::log((static_cast<double>(N_prime + N) + alpha_s) /
                          (static_cast<double>(N) + alpha_s));
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    const auto px = binomial_pmf(N, tau[j]);
    const auto py = binomial_pmf(N_prime, tau[j]);
    double expectation = 0.0;
    for (std::size_t x = 0; x < px.size(); ++x) {
      if (px[x] == 0.0) continue;
      const double base = static_cast<double>(x) + alpha[j];
      double inner = 0.0;
      for (std::size_t y = 0; y < py.size(); ++y) {
        inner += py[y] * std::log(base / (static_cast<double>(y) + base));
      }
      expectation += px[x] * inner;
    }
    delta += tau[j] * expectation;
  }
  return delta;
}

DecompositionReport risk_difference_decomposition_check(
    const ProbabilityVector& theta, const AggregationScheme& scheme, const DirichletPrior& prior,
    Count N, Count N_prime, std::size_t replications, std::uint64_t seed,
    const RiskOptions& options) {
  scheme.require_disjoint("risk_difference_decomposition_check");
  if (N_prime < 0) throw Error(ErrorCode::InvalidArgument, "N' must be >= 0");

  const std::uint64_t lhs_seed = random::derive_seed(seed, 0);
  SimulationSetting setting{scheme, prior, theta, N, N_prime, replications, lhs_seed, {}};

  DecompositionReport report;
  report.lhs = simulate_risk(setting, EstimatorKind::WithPartialClosed, options).delta;
  double variance = report.lhs.se * report.lhs.se;
  double rhs_variance = 0.0;
  for (Count u = 1; u <= N_prime; ++u) {
    setting.N = N + u - 1;
    setting.N_prime = 1;
    setting.seed = N_prime == 1 ? lhs_seed : random::derive_seed(seed, static_cast<std::uint64_t>(u));
    const McEstimate term = simulate_risk(setting, EstimatorKind::WithPartialClosed, options).delta;
    report.terms.push_back(term);
    report.rhs.value += term.value;
    rhs_variance += term.se * term.se;
  }
  report.rhs.se = std::sqrt(rhs_variance);
  if (N_prime == 1) {
    // Both sides are the same simulation.
    report.combined_se = report.lhs.se;
  } else {
    report.combined_se = std::sqrt(variance + rhs_variance);
  }
  report.consistent =
      std::abs(report.lhs.value - report.rhs.value) <= 3.0 * report.combined_se;
  return report;
}

ProbabilityVector theta_star(const AggregationScheme& scheme) {
  scheme.require_disjoint("theta_star");
  const double groups = static_cast<double>(scheme.group_count());
  std::vector<double> theta(scheme.k(), 0.0);
  for (const auto& group : scheme.groups()) {
    for (Index i : group) theta[i] = 1.0 / (groups * static_cast<double>(group.size()));
  }
  return ProbabilityVector(std::move(theta), kArithmeticTolerance);
}

double g_function(double theta, Count N, double alpha_group) {
  if (!(theta > 0.0 && theta < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "G is defined for theta in (0, 1)");
  }
  if (!(alpha_group > 0.0)) throw Error(ErrorCode::NonpositiveEntry, "alpha_group must be > 0");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be >= 0");
  return g_value(theta, N, alpha_group);
}

double delta_single_exact(const ProbabilityVector& theta, const AggregationScheme& scheme,
                          const DirichletPrior& prior, Count N) {
  scheme.require_disjoint("delta_single_exact");
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "N must be >= 0");
  const auto tau = group_mass(theta.span(), scheme);
  const auto alpha = prior.group_alpha(scheme);
  double delta = std::log1p(1.0 / (static_cast<double>(N) + prior.alpha_sum()));
  for (std::size_t j = 0; j < tau.size(); ++j) delta -= g_value(tau[j], N, alpha[j]);
  return delta;
}

double delta_theta_star_exact(const AggregationScheme& scheme, const DirichletPrior& prior,
                              Count N) {
  return delta_single_exact(theta_star(scheme), scheme, prior, N);
}

DominanceCheck dominance_condition(const DirichletPrior& prior, const AggregationScheme& scheme) {
  scheme.require_disjoint("dominance_condition");
  DominanceCheck check;
  check.group_alpha = prior.group_alpha(scheme);
  const double smallest = *std::min_element(check.group_alpha.begin(), check.group_alpha.end());
  check.satisfied = smallest >= 2.0;
  std::ostringstream msg;
  msg << "group alpha sums:";
  for (std::size_t j = 0; j < check.group_alpha.size(); ++j) {
    msg << (j ? ", " : " ") << "A_" << j << "=" << check.group_alpha[j];
  }
  msg << "; min = " << smallest << (check.satisfied ? " >= 2 (condition holds)"
                                                    : " < 2 (condition fails)");
  check.explanation = msg.str();
  return check;
}

std::vector<std::vector<double>> simplex_lattice(std::size_t k, double step,
                                                 std::size_t max_points) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "lattice needs k >= 2");
  if (!(step > 0.0 && step < 1.0)) throw Error(ErrorCode::InvalidArgument, "step must be in (0, 1)");
  const double units_d = std::round(1.0 / step);
  if (std::abs(units_d * step - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidArgument, "1/step must be an integer");
  }
  const auto units = static_cast<std::size_t>(units_d);
  if (units < k) return {};
  // Interior points: compositions of `units` into k positive parts.
  double count = 1.0;
  for (std::size_t i = 1; i < k; ++i) {
    count *= static_cast<double>(units - i) / static_cast<double>(i);
  }
  if (std::round(count) > static_cast<double>(max_points)) {
    throw Error(ErrorCode::GridTooLarge, "simplex lattice has " +
                                             std::to_string(static_cast<long long>(count)) +
                                             " points");
  }
  std::vector<std::vector<double>> points;
  points.reserve(static_cast<std::size_t>(std::round(count)));
  std::vector<std::size_t> parts(k, 1);
  auto emit = [&] {
    std::vector<double> p(k);
    for (std::size_t i = 0; i < k; ++i) p[i] = static_cast<double>(parts[i]) / units_d;
    points.push_back(std::move(p));
  };
  auto recurse = [&](auto&& self, std::size_t i, std::size_t remaining) -> void {
    if (i + 1 == k) {
      parts[i] = remaining;
      emit();
      return;
    }
    for (std::size_t v = 1; v + (k - i - 1) <= remaining; ++v) {
      parts[i] = v;
      self(self, i + 1, remaining - v);
    }
  };
  recurse(recurse, 0, units);
  return points;
}

WorstCaseReport worst_case_check(const AggregationScheme& scheme, const DirichletPrior& prior,
                                 Count N, double step, std::size_t replications,
                                 std::uint64_t seed, const RiskOptions& options,
                                 std::size_t max_points) {
  WorstCaseReport report;
  const DominanceCheck condition = dominance_condition(prior, scheme);
  if (!condition.satisfied) {
    report.skipped = true;
    report.explanation = "skipped: " + condition.explanation;
    return report;
  }
  report.explanation = condition.explanation;

  const ProbabilityVector star = theta_star(scheme);
  report.theta_star = star.values();
  auto grid = simplex_lattice(scheme.k(), step, max_points);
  auto is_star = [&](const std::vector<double>& p) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (std::abs(p[i] - star[i]) > 1e-12) return false;
    }
    return true;
  };
  if (std::none_of(grid.begin(), grid.end(), is_star)) grid.push_back(star.values());
  report.grid_points = grid.size();

  std::vector<McEstimate> estimates(grid.size());
  std::vector<double> exact(grid.size());
  RiskOptions inner = options;
  inner.threads = 1;
  parallel_for(grid.size(), options.threads, [&](std::size_t g) {
    const ProbabilityVector theta(grid[g], kArithmeticTolerance);
    // Common random numbers: every grid point uses the same seed.
    const SimulationSetting setting{scheme, prior, theta, N, 1, replications, seed, {}};
    estimates[g] = simulate_risk(setting, EstimatorKind::WithPartialClosed, inner).delta;
    exact[g] = delta_single_exact(theta, scheme, prior, N);
  });

  auto distance_to_star = [&](const std::vector<double>& p) {
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - star[i]);
    return d;
  };
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    const double tol = 1e-12 * std::max(1.0, std::abs(estimates[best].value));
    if (estimates[g].value > estimates[best].value + tol) {
      best = g;
    } else if (std::abs(estimates[g].value - estimates[best].value) <= tol &&
               distance_to_star(grid[g]) < distance_to_star(grid[best])) {
      best = g;
    }
    if (is_star(grid[g])) report.theta_star_mc = estimates[g];
  }
  if (is_star(grid[0])) report.theta_star_mc = estimates[0];

  report.argmax_theta = grid[best];
  report.grid_max = estimates[best];
  report.exact_grid_max = *std::max_element(exact.begin(), exact.end());
  report.theta_star_exact = delta_theta_star_exact(scheme, prior, N);
  report.passed = report.grid_max.value <= report.theta_star_exact + 3.0 * report.grid_max.se;
  return report;
}

}  // namespace pcbayes
