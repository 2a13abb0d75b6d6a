#include "pcbayes/reconcile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcbayes/estimator.hpp"
#include "pcbayes/parallel.hpp"
#include "pcbayes/random.hpp"

namespace pcbayes {

const char* to_string(SamplerKind kind) noexcept {
  switch (kind) {
    case SamplerKind::Auto: return "auto";
    case SamplerKind::ClosedForm: return "closed_form";
    case SamplerKind::Gibbs: return "gibbs";
  }
  return "unknown";
}

Count CountTable::total() const {
  Count sum = 0;
  for (const auto& row : counts) sum += pcbayes::total(row);
  return sum;
}

void CountTable::validate() const {
  if (row_labels.size() != counts.size()) {
    throw Error(ErrorCode::DimensionMismatch, "table has " + std::to_string(counts.size()) +
                                                  " rows but " +
                                                  std::to_string(row_labels.size()) + " labels");
  }
  for (std::size_t r = 0; r < counts.size(); ++r) {
    if (counts[r].size() != column_labels.size()) {
      throw Error(ErrorCode::DimensionMismatch,
                  "row '" + row_labels[r] + "' has " + std::to_string(counts[r].size()) +
                      " cells, expected " + std::to_string(column_labels.size()));
    }
    for (Count c : counts[r]) {
      if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative count in row '" + row_labels[r] + "'");
    }
  }
}

CountVector largest_remainder(Count total, std::span<const double> weights) {
  if (total < 0) throw Error(ErrorCode::InvalidArgument, "cannot apportion a negative total");
  if (weights.empty()) throw Error(ErrorCode::InvalidArgument, "no weights to apportion over");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidArgument, "apportionment weights must be finite and >= 0");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(ErrorCode::InvalidArgument, "apportionment weights sum to zero");

  const std::size_t n = weights.size();
  CountVector seats(n);
  std::vector<double> fraction(n);
  Count assigned = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double quota = static_cast<double>(total) * weights[i] / sum;
    const double whole = std::floor(quota);
    seats[i] = static_cast<Count>(whole);
    fraction[i] = quota - whole;
    assigned += seats[i];
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return fraction[a] > fraction[b]; });
  Count left = total - assigned;
  for (std::size_t q = 0; left > 0; q = (q + 1) % n, --left) ++seats[order[q]];
  return seats;
}

namespace {

void check_tables(const CountTable& reference, const CountTable& aggregated,
                  const AggregationScheme& scheme) {
  reference.validate();
  aggregated.validate();
  if (reference.columns() != scheme.k()) {
    throw Error(ErrorCode::SchemeMismatch, "reference table has " +
                                               std::to_string(reference.columns()) +
                                               " columns, scheme has k=" +
                                               std::to_string(scheme.k()));
  }
  if (aggregated.columns() != scheme.group_count()) {
    throw Error(ErrorCode::SchemeMismatch, "aggregated table has " +
                                               std::to_string(aggregated.columns()) +
                                               " columns, scheme has " +
                                               std::to_string(scheme.group_count()) + " groups");
  }
  if (reference.rows() != aggregated.rows()) {
    throw Error(ErrorCode::RowMismatch, "reference has " + std::to_string(reference.rows()) +
                                            " rows, aggregated has " +
                                            std::to_string(aggregated.rows()));
  }
  for (std::size_t c = 0; c < reference.rows(); ++c) {
    if (reference.row_labels[c] != aggregated.row_labels[c]) {
      throw Error(ErrorCode::RowMismatch, "row " + std::to_string(c + 1) + " is '" +
                                              reference.row_labels[c] + "' in the reference but '" +
                                              aggregated.row_labels[c] + "' in the aggregated table");
    }
  }
}

}  // namespace

ReconcileResult disaggregate_table(const CountTable& reference, const CountTable& aggregated,
                                   const AggregationScheme& scheme, const DirichletPrior& prior,
                                   const ReconcileOptions& options) {
  check_tables(reference, aggregated, scheme);
  if (prior.k() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "prior and scheme disagree on k");
  }

  SamplerKind sampler = options.sampler;
  if (sampler == SamplerKind::Auto) {
    sampler = scheme.overlapping() ? SamplerKind::Gibbs : SamplerKind::ClosedForm;
  }
  if (sampler == SamplerKind::ClosedForm) scheme.require_disjoint("closed-form reconciliation");
  if (sampler == SamplerKind::Gibbs) options.gibbs.validate(kBatchMeansBatches);

  const std::size_t causes = reference.rows();
  const std::size_t groups = scheme.group_count();

  ReconcileResult result;
  result.sampler_used = sampler;
  result.predicted.row_labels = reference.row_labels;
  result.predicted.column_labels = reference.column_labels;
  result.predicted.counts.assign(causes, CountVector(scheme.k(), 0));
  result.posterior_theta.assign(causes, ProbabilityVector::uniform(scheme.k()));
  result.conditionals.resize(causes);
  std::vector<std::string> row_warning(causes);

  const std::uint64_t allocation_seed = random::derive_seed(options.seed, 0xa110c);

  parallel_for(causes, options.threads, [&](std::size_t c) {
    const CountVector& x = reference.counts[c];
    const CountVector& y = aggregated.counts[c];
    if (total(x) == 0) {
      row_warning[c] = "cause '" + reference.row_labels[c] +
                       "' has no reference counts; using the prior's within-group shares";
    }

    auto& conditionals = result.conditionals[c];
    conditionals.resize(groups);
    if (sampler == SamplerKind::ClosedForm) {
      for (std::size_t j = 0; j < groups; ++j) {
        const auto& members = scheme.group(j);
        double denom = 0.0;
        for (Index i : members) denom += prior[i] + static_cast<double>(x[i]);
        conditionals[j].resize(members.size());
        for (std::size_t r = 0; r < members.size(); ++r) {
          conditionals[j][r] = (prior[members[r]] + static_cast<double>(x[members[r]])) / denom;
        }
      }
      result.posterior_theta[c] = bayes_with_partial(x, y, scheme, prior);
    } else {
      GibbsConfig config = options.gibbs;
      config.seed = random::derive_seed(options.seed, c);
      config.store_draws = false;
      PosteriorDraws draws = gibbs_posterior(x, y, scheme, prior, config);
      conditionals = std::move(draws.group_conditional_mean);
      result.posterior_theta[c] = std::move(draws.mean);
    }

    random::Engine rng = random::make_engine(allocation_seed, c);
    CountVector& row = result.predicted.counts[c];
    for (std::size_t j = 0; j < groups; ++j) {
      const auto& members = scheme.group(j);
      CountVector split(members.size(), 0);
      if (y[j] > 0) {
        if (options.mode == AllocationMode::Expected) {
          split = largest_remainder(y[j], conditionals[j]);
        } else {
          random::multinomial(rng, y[j], conditionals[j], split);
        }
      }
      for (std::size_t r = 0; r < members.size(); ++r) row[members[r]] += split[r];
    }
  });

  for (auto& w : row_warning) {
    if (!w.empty()) result.warnings.push_back(std::move(w));
  }
  return result;
}

CountTable random_assignment_baseline(const CountTable& aggregated,
                                      const AggregationScheme& scheme, std::size_t k,
                                      std::uint64_t seed,
                                      const std::vector<std::string>& fine_labels) {
  aggregated.validate();
  if (scheme.k() != k) throw Error(ErrorCode::SchemeMismatch, "scheme k differs from k");
  if (aggregated.columns() != scheme.group_count()) {
    throw Error(ErrorCode::SchemeMismatch, "aggregated table columns differ from scheme groups");
  }
  CountTable out;
  out.row_labels = aggregated.row_labels;
  if (fine_labels.size() == k) {
    out.column_labels = fine_labels;
  } else {
    for (std::size_t i = 1; i <= k; ++i) out.column_labels.push_back(std::to_string(i));
  }
  out.counts.assign(aggregated.rows(), CountVector(k, 0));
  for (std::size_t c = 0; c < aggregated.rows(); ++c) {
    random::Engine rng = random::make_engine(seed, c);
    for (std::size_t j = 0; j < scheme.group_count(); ++j) {
      const auto& members = scheme.group(j);
      const std::vector<double> uniform(members.size(), 1.0);
      CountVector split(members.size(), 0);
      random::multinomial(rng, aggregated.counts[c][j], uniform, split);
      for (std::size_t r = 0; r < members.size(); ++r) out.counts[c][members[r]] += split[r];
    }
  }
  return out;
}

McEstimate baseline_accuracy(const CountTable& aggregated, const CountTable& truth,
                             const AggregationScheme& scheme, std::size_t seeds,
                             std::uint64_t base_seed) {
  if (seeds == 0) throw Error(ErrorCode::InvalidArgument, "need at least one baseline seed");
  std::vector<double> values(seeds);
  for (std::size_t s = 0; s < seeds; ++s) {
    const CountTable guess = random_assignment_baseline(
        aggregated, scheme, scheme.k(), random::derive_seed(base_seed, s), truth.column_labels);
    values[s] = table_accuracy(guess, truth);
  }
  const double n = static_cast<double>(seeds);
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double se = seeds > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  return {mean, se};
}

double table_accuracy(const CountTable& predicted, const CountTable& truth) {
  if (predicted.rows() != truth.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "tables differ in row count");
  }
  Count overlap = 0;
  Count truth_total = 0;
  Count predicted_total = 0;
  for (std::size_t r = 0; r < truth.rows(); ++r) {
    if (predicted.counts[r].size() != truth.counts[r].size()) {
      throw Error(ErrorCode::DimensionMismatch, "tables differ in column count");
    }
    for (std::size_t i = 0; i < truth.counts[r].size(); ++i) {
      overlap += std::min(predicted.counts[r][i], truth.counts[r][i]);
      truth_total += truth.counts[r][i];
      predicted_total += predicted.counts[r][i];
    }
  }
  if (truth_total != predicted_total) {
    throw Error(ErrorCode::TotalMismatch, "predicted total " + std::to_string(predicted_total) +
                                              " differs from truth total " +
                                              std::to_string(truth_total));
  }
  if (truth_total == 0) return 1.0;
  return static_cast<double>(overlap) / static_cast<double>(truth_total);
}

}  // namespace pcbayes
