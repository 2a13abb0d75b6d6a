#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcbayes/core.hpp"
#include "pcbayes/gibbs.hpp"
#include "pcbayes/risk.hpp"

namespace pcbayes {

/// Cause-by-category count matrix with row and column labels.
struct CountTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> column_labels;
  std::vector<CountVector> counts;

  std::size_t rows() const noexcept { return counts.size(); }
  std::size_t columns() const noexcept { return column_labels.size(); }
  Count total() const;

  /// Throws on ragged rows, label count mismatches or negative cells.
  void validate() const;

  bool operator==(const CountTable&) const = default;
};

enum class AllocationMode { Expected, Stochastic };
enum class SamplerKind { Auto, ClosedForm, Gibbs };

const char* to_string(SamplerKind kind) noexcept;

struct ReconcileOptions {
  AllocationMode mode = AllocationMode::Expected;
  SamplerKind sampler = SamplerKind::Auto;
  std::uint64_t seed = 0;
  GibbsConfig gibbs{};
  std::size_t threads = 1;
};

struct ReconcileResult {
  CountTable predicted;
  std::vector<ProbabilityVector> posterior_theta;
  /// Per cause, per group: the within-group shares used to split y.
  std::vector<std::vector<std::vector<double>>> conditionals;
  SamplerKind sampler_used = SamplerKind::ClosedForm;
  std::vector<std::string> warnings;
  std::optional<double> accuracy;
  std::optional<double> baseline_accuracy;
};

/// Splits every aggregated count y_{c,A_j} over the fine categories of A_j
/// using the posterior within-group shares for cause c. The reference row is
/// the fully classified x for that cause. Expected mode rounds each split by
/// largest remainder so group totals are kept exactly; stochastic mode draws
/// one multinomial split per (cause, group).
ReconcileResult disaggregate_table(const CountTable& reference, const CountTable& aggregated,
                                   const AggregationScheme& scheme, const DirichletPrior& prior,
                                   const ReconcileOptions& options = {});

/// Each aggregated observation lands uniformly at random on one member of its
/// group.
CountTable random_assignment_baseline(const CountTable& aggregated,
                                      const AggregationScheme& scheme, std::size_t k,
                                      std::uint64_t seed,
                                      const std::vector<std::string>& fine_labels = {});

/// Mean accuracy of the random baseline over `seeds` streams derived from
/// base_seed.
McEstimate baseline_accuracy(const CountTable& aggregated, const CountTable& truth,
                             const AggregationScheme& scheme, std::size_t seeds,
                             std::uint64_t base_seed);

/// sum_cells min(predicted, truth) / sum_cells truth.
double table_accuracy(const CountTable& predicted, const CountTable& truth);

/// Hamilton apportionment of `total` by `weights`; ties go to the lower index.
CountVector largest_remainder(Count total, std::span<const double> weights);

}  // namespace pcbayes
