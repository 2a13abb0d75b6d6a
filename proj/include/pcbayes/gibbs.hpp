#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "pcbayes/core.hpp"

namespace pcbayes {

struct GibbsConfig {
  std::size_t iterations = 20000;
  std::size_t burn_in = 5000;
  std::size_t thin = 1;
  std::uint64_t seed = 0;
  /// Keep every retained draw. Off for callers that only need summaries.
  bool store_draws = true;

  std::size_t retained() const noexcept {
    return iterations > burn_in ? (iterations - burn_in) / (thin == 0 ? 1 : thin) : 0;
  }

  /// Throws InvalidArgument if the configuration is malformed or retains
  /// fewer than min_retained draws.
  void validate(std::size_t min_retained = 100) const;
};

inline constexpr std::size_t kBatchMeansBatches = 50;

struct PosteriorDraws {
  /// One row per retained iteration (empty unless store_draws).
  std::vector<std::vector<double>> draws;
  ProbabilityVector mean = ProbabilityVector::uniform(2);
  /// Batch-means Monte Carlo standard error per coordinate.
  std::vector<double> mc_se;
  /// Posterior mean of theta_i / theta_{A_j} for i in A_j, aligned with
  /// scheme.group(j).
  std::vector<std::vector<double>> group_conditional_mean;
  std::size_t retained = 0;
};

/// What an observer sees after each sweep.
struct GibbsSweep {
  std::size_t iteration;
  /// allocations[j][r] = z_{i|A_j} for i = scheme.group(j)[r].
  const std::vector<CountVector>& allocations;
  std::span<const double> theta;
};

using GibbsObserver = std::function<void(const GibbsSweep&)>;

/// Data-augmentation Gibbs sampler for partially classified counts. Works for
/// disjoint and overlapping schemes. Each sweep splits every y_j over the
/// members of A_j in proportion to the current theta, adds the splits to x,
/// and redraws theta from the conjugate Dirichlet. The chain starts at the
/// normalised alpha + x and is a pure function of (inputs, config.seed).
PosteriorDraws gibbs_posterior(std::span<const Count> x, std::span<const Count> y,
                               const AggregationScheme& scheme, const DirichletPrior& prior,
                               const GibbsConfig& config, const GibbsObserver& observer = {});

inline constexpr double kMaxEnumerationStates = 1e7;

/// Exact posterior mean obtained by summing over every way of splitting each
/// y_j among the members of A_j. Throws EnumerationTooLarge when that product
/// of composition counts exceeds max_states.
ProbabilityVector exact_posterior_small(std::span<const Count> x, std::span<const Count> y,
                                        const AggregationScheme& scheme,
                                        const DirichletPrior& prior,
                                        double max_states = kMaxEnumerationStates);

/// Number of allocations exact_posterior_small would visit.
double enumeration_size(std::span<const Count> y, const AggregationScheme& scheme);

}  // namespace pcbayes
