#pragma once

#include <span>
#include <vector>

#include "pcbayes/core.hpp"

namespace pcbayes {

/// Posterior mean from fully classified counts only:
/// (x_i + alpha_i) / (alpha_S + N).
ProbabilityVector bayes_full_only(std::span<const Count> x, const DirichletPrior& prior);

/// Posterior mean under a disjoint scheme, using both x and the group
/// totals y:
///
///   theta_i = (alpha_i + x_i) / (x_A + alpha_A) * (y_A + alpha_A + x_A) / (N + N' + alpha_S)
///
/// where A is the group holding i. When every y_j is zero the result is
/// bayes_full_only(x, prior), bit for bit.
ProbabilityVector bayes_with_partial(std::span<const Count> x, std::span<const Count> y,
                                     const AggregationScheme& scheme,
                                     const DirichletPrior& prior);

/// The posterior as independent Dirichlet blocks: one over group masses tau,
/// one per group over the within-group shares rho_{A_j}.
struct PosteriorFactorization {
  std::vector<double> tau_params;
  std::vector<std::vector<double>> rho_params;  // aligned with scheme.groups()

  std::vector<double> tau_mean() const;
  std::vector<double> rho_mean(std::size_t group) const;

  /// mean(tau_j) * mean(rho_{A_j}^{(i)}), assembled over the scheme.
  std::vector<double> theta_mean(const AggregationScheme& scheme) const;
};

PosteriorFactorization posterior_factorization(std::span<const Count> x,
                                               std::span<const Count> y,
                                               const AggregationScheme& scheme,
                                               const DirichletPrior& prior);

inline constexpr double kLogGuard = 1e-300;

/// KL loss sum_i truth_i * log(truth_i / estimate_i). Entries below kLogGuard
/// in either argument raise NonpositiveEntry.
double kl_loss(std::span<const double> estimate, std::span<const double> truth);

inline double kl_loss(const ProbabilityVector& estimate, const ProbabilityVector& truth) {
  return kl_loss(estimate.span(), truth.span());
}

}  // namespace pcbayes
