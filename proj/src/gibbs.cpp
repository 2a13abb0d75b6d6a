#include "pcbayes/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pcbayes/estimator.hpp"
#include "pcbayes/random.hpp"

namespace pcbayes {

void GibbsConfig::validate(std::size_t min_retained) const {
  if (iterations == 0) throw Error(ErrorCode::InvalidArgument, "iterations must be positive");
  if (thin == 0) throw Error(ErrorCode::InvalidArgument, "thin must be positive");
  if (burn_in >= iterations) {
    throw Error(ErrorCode::InvalidArgument, "burn_in must be smaller than iterations");
  }
  if (retained() < min_retained) {
    throw Error(ErrorCode::InvalidArgument,
                "configuration retains " + std::to_string(retained()) + " draws, need at least " +
                    std::to_string(min_retained));
  }
}

namespace {

void check_inputs(std::span<const Count> x, std::span<const Count> y,
                  const AggregationScheme& scheme, const DirichletPrior& prior) {
  if (prior.k() != scheme.k() || x.size() != scheme.k()) {
    throw Error(ErrorCode::DimensionMismatch, "x, prior and scheme must share k");
  }
  if (y.size() != scheme.group_count()) {
    throw Error(ErrorCode::DimensionMismatch, "y needs one entry per group");
  }
  for (Count c : x) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative count in x");
  }
  for (Count c : y) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative count in y");
  }
}

}  // namespace

PosteriorDraws gibbs_posterior(std::span<const Count> x, std::span<const Count> y,
                               const AggregationScheme& scheme, const DirichletPrior& prior,
                               const GibbsConfig& config, const GibbsObserver& observer) {
  config.validate(kBatchMeansBatches);
  check_inputs(x, y, scheme, prior);

  const std::size_t k = scheme.k();
  const std::size_t groups = scheme.group_count();
  random::Engine rng(config.seed);

  std::vector<double> theta(k);
  {
    double sum = 0.0;
    for (Index i = 0; i < k; ++i) sum += theta[i] = prior[i] + static_cast<double>(x[i]);
    for (double& t : theta) t /= sum;
  }

  std::vector<CountVector> allocations(groups);
  std::vector<std::vector<double>> shares(groups);
  for (std::size_t j = 0; j < groups; ++j) {
    allocations[j].assign(scheme.group(j).size(), 0);
    shares[j].resize(scheme.group(j).size());
  }
  std::vector<double> concentration(k);

  const std::size_t retained = config.retained();
  const std::size_t batch_size = retained / kBatchMeansBatches;

  PosteriorDraws out;
  out.retained = retained;
  if (config.store_draws) out.draws.reserve(retained);
  std::vector<double> sum(k, 0.0);
  std::vector<std::vector<double>> batch_sum(kBatchMeansBatches, std::vector<double>(k, 0.0));
  std::vector<std::size_t> batch_n(kBatchMeansBatches, 0);
  out.group_conditional_mean.resize(groups);
  for (std::size_t j = 0; j < groups; ++j) {
    out.group_conditional_mean[j].assign(scheme.group(j).size(), 0.0);
  }

  std::size_t kept = 0;
  for (std::size_t t = 0; t < config.iterations; ++t) {
    for (Index i = 0; i < k; ++i) concentration[i] = prior[i] + static_cast<double>(x[i]);

    for (std::size_t j = 0; j < groups; ++j) {
      const auto& members = scheme.group(j);
      if (y[j] == 0) {
        std::fill(allocations[j].begin(), allocations[j].end(), 0);
        continue;
      }
      double mass = 0.0;
      for (std::size_t r = 0; r < members.size(); ++r) mass += shares[j][r] = theta[members[r]];
      if (!(mass > 0.0)) {
        throw Error(ErrorCode::DegenerateGroup,
                    "group " + std::to_string(j) + " has zero probability mass");
      }
      random::multinomial(rng, y[j], shares[j], allocations[j]);
      for (std::size_t r = 0; r < members.size(); ++r) {
        concentration[members[r]] += static_cast<double>(allocations[j][r]);
      }
    }

    random::dirichlet(rng, concentration, theta);

    if (observer) observer(GibbsSweep{t, allocations, theta});

    if (t < config.burn_in || (t - config.burn_in) % config.thin != 0 || kept >= retained) {
      continue;
    }
    const std::size_t batch = std::min(kept / batch_size, kBatchMeansBatches - 1);
    for (Index i = 0; i < k; ++i) {
      sum[i] += theta[i];
      batch_sum[batch][i] += theta[i];
    }
    ++batch_n[batch];
    for (std::size_t j = 0; j < groups; ++j) {
      const auto& members = scheme.group(j);
      double mass = 0.0;
      for (Index i : members) mass += theta[i];
      for (std::size_t r = 0; r < members.size(); ++r) {
        out.group_conditional_mean[j][r] += theta[members[r]] / mass;
      }
    }
    if (config.store_draws) out.draws.push_back(theta);
    ++kept;
  }

  std::vector<double> mean(k);
  for (Index i = 0; i < k; ++i) mean[i] = sum[i] / static_cast<double>(kept);
  out.mean = ProbabilityVector(std::move(mean), kArithmeticTolerance);
  for (auto& cond : out.group_conditional_mean) {
    for (double& v : cond) v /= static_cast<double>(kept);
  }

  out.mc_se.assign(k, 0.0);
  const double batches = static_cast<double>(kBatchMeansBatches);
  for (Index i = 0; i < k; ++i) {
    double ss = 0.0;
    for (std::size_t b = 0; b < kBatchMeansBatches; ++b) {
      const double d = batch_sum[b][i] / static_cast<double>(batch_n[b]) - out.mean[i];
      ss += d * d;
    }
    out.mc_se[i] = std::sqrt(ss / (batches - 1.0) / batches);
  }
  return out;
}

// ---------------------------------------------------------------------------

double enumeration_size(std::span<const Count> y, const AggregationScheme& scheme) {
  if (y.size() != scheme.group_count()) {
    throw Error(ErrorCode::DimensionMismatch, "y needs one entry per group");
  }
  double states = 1.0;
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    const double n = static_cast<double>(scheme.group(j).size());
    const double total = static_cast<double>(y[j]);
    // C(y + n - 1, n - 1)
    states *= std::exp(std::lgamma(total + n) - std::lgamma(total + 1) - std::lgamma(n));
  }
  return std::round(states);
}

namespace {

// Streams the allocation-weighted posterior mean with a running log-sum-exp.
class AllocationEnumerator {
 public:
  AllocationEnumerator(std::span<const Count> y, const AggregationScheme& scheme,
                       std::vector<double> base)
      : y_(y), scheme_(scheme), extra_(std::move(base)), weighted_(extra_.size(), 0.0) {}

  void run() { visit_group(0, 0.0); }

  std::vector<double> weighted_counts() const {
    std::vector<double> out(weighted_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = weighted_[i] / norm_;
    return out;
  }

 private:
  void visit_group(std::size_t j, double log_w) {
    if (j == scheme_.group_count()) {
      finish(log_w);
      return;
    }
    log_w += std::lgamma(static_cast<double>(y_[j]) + 1.0);
    visit_member(j, 0, y_[j], log_w);
  }

  void visit_member(std::size_t j, std::size_t r, Count remaining, double log_w) {
    const auto& members = scheme_.group(j);
    const Index i = members[r];
    if (r + 1 == members.size()) {
      extra_[i] += static_cast<double>(remaining);
      visit_group(j + 1, log_w - std::lgamma(static_cast<double>(remaining) + 1.0));
      extra_[i] -= static_cast<double>(remaining);
      return;
    }
    for (Count z = 0; z <= remaining; ++z) {
      extra_[i] += static_cast<double>(z);
      visit_member(j, r + 1, remaining - z, log_w - std::lgamma(static_cast<double>(z) + 1.0));
      extra_[i] -= static_cast<double>(z);
    }
  }

  void finish(double log_w) {
    // extra_ holds alpha + x + allocated counts.
    for (double c : extra_) log_w += std::lgamma(c);
    if (log_w > max_log_) {
      const double scale = std::exp(max_log_ - log_w);
      norm_ *= scale;
      for (double& v : weighted_) v *= scale;
      max_log_ = log_w;
    }
    const double w = std::exp(log_w - max_log_);
    norm_ += w;
    for (std::size_t i = 0; i < extra_.size(); ++i) weighted_[i] += w * extra_[i];
  }

  std::span<const Count> y_;
  const AggregationScheme& scheme_;
  std::vector<double> extra_;
  std::vector<double> weighted_;
  double norm_ = 0.0;
  double max_log_ = -std::numeric_limits<double>::infinity();
};

}  // namespace

ProbabilityVector exact_posterior_small(std::span<const Count> x, std::span<const Count> y,
                                        const AggregationScheme& scheme,
                                        const DirichletPrior& prior, double max_states) {
  check_inputs(x, y, scheme, prior);
  const double states = enumeration_size(y, scheme);
  if (states > max_states) {
    throw Error(ErrorCode::EnumerationTooLarge,
                "exact enumeration needs " + std::to_string(states) + " allocations");
  }
  if (std::all_of(y.begin(), y.end(), [](Count c) { return c == 0; })) {
    return bayes_full_only(x, prior);
  }
  std::vector<double> base(scheme.k());
  for (Index i = 0; i < scheme.k(); ++i) base[i] = prior[i] + static_cast<double>(x[i]);

  AllocationEnumerator enumerator(y, scheme, base);
  enumerator.run();
  auto mean = enumerator.weighted_counts();
  double sum = 0.0;
  for (double v : mean) sum += v;
  for (double& v : mean) v /= sum;
  return ProbabilityVector(std::move(mean), kArithmeticTolerance);
}

}  // namespace pcbayes
