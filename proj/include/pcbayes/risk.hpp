#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pcbayes/core.hpp"
#include "pcbayes/gibbs.hpp"

namespace pcbayes {

enum class EstimatorKind { WithPartialClosed, WithPartialGibbs, FullOnly };

const char* to_string(EstimatorKind kind) noexcept;
EstimatorKind parse_estimator_kind(const std::string& name);

struct McEstimate {
  double value = 0.0;
  double se = 0.0;
};

inline constexpr std::size_t kMinReplications = 100;
inline constexpr std::size_t kDefaultReplications = 100000;

/// Fixed-theta experiment: X ~ Multi(N, theta), Y' ~ Multi(N', theta) reported
/// through the scheme.
struct SimulationSetting {
  AggregationScheme scheme;
  DirichletPrior prior;
  ProbabilityVector theta;
  Count N = 0;
  Count N_prime = 0;
  std::size_t replications = kDefaultReplications;
  std::uint64_t seed = 0;
  /// Required when the scheme overlaps; ignored otherwise.
  std::optional<ReportingMap> reporting;
};

/// Same experiment with theta redrawn from the prior on every replication.
struct BayesRiskSetting {
  AggregationScheme scheme;
  DirichletPrior prior;
  Count N = 0;
  Count N_prime = 0;
  std::size_t replications = kDefaultReplications;
  std::uint64_t seed = 0;
  std::optional<ReportingMap> reporting;
};

/// Short chains for risk curves; every replication runs its own chain.
GibbsConfig default_risk_gibbs_config();

struct RiskOptions {
  std::size_t threads = 1;
  GibbsConfig gibbs = default_risk_gibbs_config();
};

struct RiskReport {
  McEstimate risk_hat;    // partial-data estimator
  McEstimate risk_tilde;  // full-data-only estimator
  McEstimate delta;       // paired risk_hat - risk_tilde
  bool dominance_flag = false;  // delta + 2 se < 0
  std::size_t replications = 0;
  EstimatorKind estimator = EstimatorKind::WithPartialClosed;
  bool bayes_risk = false;
};

/// Monte Carlo KL risk of both estimators on common draws. Replication r uses
/// the stream derive_seed(seed, r), so reports do not depend on threads.
RiskReport simulate_risk(const SimulationSetting& setting, EstimatorKind estimator,
                         const RiskOptions& options = {});

RiskReport bayes_risk(const BayesRiskSetting& setting, EstimatorKind estimator,
                      const RiskOptions& options = {});

/// Risk difference by finite summation over the group-level binomials
/// (disjoint schemes). The loss difference depends on the data only through
/// x_{A_j} and y_{A_j}, so no Monte Carlo is needed.
double exact_risk_difference(const ProbabilityVector& theta, const AggregationScheme& scheme,
                             const DirichletPrior& prior, Count N, Count N_prime);

struct DecompositionReport {
  McEstimate lhs;                 // Delta(N, N')
  std::vector<McEstimate> terms;  // Delta(N + u - 1, 1), u = 1..N'
  McEstimate rhs;                 // sum of terms
  double combined_se = 0.0;
  bool consistent = false;        // |lhs - rhs| <= 3 combined_se
};

/// Estimates both sides of Delta(N, N') = sum_u Delta(N + u - 1, 1) with
/// independent simulations (the u = 1 term reuses the left side's stream when
/// N' = 1, making the two sides identical).
DecompositionReport risk_difference_decomposition_check(
    const ProbabilityVector& theta, const AggregationScheme& scheme, const DirichletPrior& prior,
    Count N, Count N_prime, std::size_t replications, std::uint64_t seed,
    const RiskOptions& options = {});

/// Equal mass 1/(m+1) per group, spread uniformly inside each group.
ProbabilityVector theta_star(const AggregationScheme& scheme);

/// G(theta) = theta^2 E[-log(1 - 1/(1 + X + alpha_group))], X ~ Bin(N, theta),
/// summed exactly over the N + 1 outcomes.
double g_function(double theta, Count N, double alpha_group);

/// Delta(N, 1) = log(1 + 1/(N + alpha_S)) - sum_j G_j(theta_{A_j}).
double delta_single_exact(const ProbabilityVector& theta, const AggregationScheme& scheme,
                          const DirichletPrior& prior, Count N);

double delta_theta_star_exact(const AggregationScheme& scheme, const DirichletPrior& prior,
                              Count N);

struct DominanceCheck {
  bool satisfied = false;
  std::vector<double> group_alpha;
  std::string explanation;
};

/// min_j alpha_{A_j} >= 2.
DominanceCheck dominance_condition(const DirichletPrior& prior, const AggregationScheme& scheme);

/// Interior points of the lattice {multiples of step} on the k-simplex.
/// Throws GridTooLarge above max_points.
std::vector<std::vector<double>> simplex_lattice(std::size_t k, double step,
                                                 std::size_t max_points = 200000);

struct WorstCaseReport {
  bool skipped = false;
  std::string explanation;
  std::size_t grid_points = 0;
  std::vector<double> argmax_theta;
  McEstimate grid_max;
  std::vector<double> theta_star;
  double theta_star_exact = 0.0;
  McEstimate theta_star_mc;
  double exact_grid_max = 0.0;
  bool passed = false;  // grid_max <= theta_star_exact + 3 se
};

/// Estimates Delta(N, 1) at every lattice point with common random numbers and
/// checks that none exceeds Delta at theta* by more than 3 standard errors.
/// Skipped (not failed) when the dominance condition does not hold.
WorstCaseReport worst_case_check(const AggregationScheme& scheme, const DirichletPrior& prior,
                                 Count N, double step, std::size_t replications,
                                 std::uint64_t seed, const RiskOptions& options = {},
                                 std::size_t max_points = 200000);

}  // namespace pcbayes
