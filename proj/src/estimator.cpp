#include "pcbayes/estimator.hpp"

#include <cmath>

namespace pcbayes {

namespace {

void check_x(std::span<const Count> x, const DirichletPrior& prior) {
  if (x.size() != prior.k()) {
    throw Error(ErrorCode::DimensionMismatch, "x has " + std::to_string(x.size()) +
                                                  " entries, prior has " +
                                                  std::to_string(prior.k()));
  }
  for (Count c : x) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative count in x");
  }
}

void check_partial(std::span<const Count> x, std::span<const Count> y,
                   const AggregationScheme& scheme, const DirichletPrior& prior) {
  check_x(x, prior);
  if (scheme.k() != prior.k()) {
    throw Error(ErrorCode::DimensionMismatch, "scheme and prior disagree on k");
  }
  if (y.size() != scheme.group_count()) {
    throw Error(ErrorCode::DimensionMismatch, "y has " + std::to_string(y.size()) +
                                                  " entries, scheme has " +
                                                  std::to_string(scheme.group_count()) +
                                                  " groups");
  }
  for (Count c : y) {
    if (c < 0) throw Error(ErrorCode::InvalidArgument, "negative count in y");
  }
}

bool all_zero(std::span<const Count> v) {
  for (Count c : v) {
    if (c != 0) return false;
  }
  return true;
}

}  // namespace

ProbabilityVector bayes_full_only(std::span<const Count> x, const DirichletPrior& prior) {
  check_x(x, prior);
  const double denom = prior.alpha_sum() + static_cast<double>(total(x));
  std::vector<double> theta(x.size());
  for (Index i = 0; i < x.size(); ++i) {
    theta[i] = (static_cast<double>(x[i]) + prior[i]) / denom;
  }
  return ProbabilityVector(std::move(theta), kArithmeticTolerance);
}

ProbabilityVector bayes_with_partial(std::span<const Count> x, std::span<const Count> y,
                                     const AggregationScheme& scheme,
                                     const DirichletPrior& prior) {
  scheme.require_disjoint("bayes_with_partial");
  check_partial(x, y, scheme, prior);
  if (all_zero(y)) return bayes_full_only(x, prior);

  const double denom =
      static_cast<double>(total(x) + total(y)) + prior.alpha_sum();
  std::vector<double> theta(x.size());
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    double x_group = 0.0;
    double alpha_group = 0.0;
    for (Index i : scheme.group(j)) {
      x_group += static_cast<double>(x[i]);
      alpha_group += prior[i];
    }
    const double within_denom = x_group + alpha_group;
    const double group_share = (static_cast<double>(y[j]) + alpha_group + x_group) / denom;
    for (Index i : scheme.group(j)) {
      theta[i] = (prior[i] + static_cast<double>(x[i])) / within_denom * group_share;
    }
  }
  return ProbabilityVector(std::move(theta), kArithmeticTolerance);
}

std::vector<double> PosteriorFactorization::tau_mean() const {
  double sum = 0.0;
  for (double a : tau_params) sum += a;
  std::vector<double> mean(tau_params.size());
  for (std::size_t j = 0; j < mean.size(); ++j) mean[j] = tau_params[j] / sum;
  return mean;
}

std::vector<double> PosteriorFactorization::rho_mean(std::size_t group) const {
  const auto& block = rho_params.at(group);
  double sum = 0.0;
  for (double a : block) sum += a;
  std::vector<double> mean(block.size());
  for (std::size_t r = 0; r < mean.size(); ++r) mean[r] = block[r] / sum;
  return mean;
}

std::vector<double> PosteriorFactorization::theta_mean(const AggregationScheme& scheme) const {
  const auto tau = tau_mean();
  std::vector<double> theta(scheme.k(), 0.0);
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    const auto rho = rho_mean(j);
    const auto& members = scheme.group(j);
    for (std::size_t r = 0; r < members.size(); ++r) theta[members[r]] = tau[j] * rho[r];
  }
  return theta;
}

PosteriorFactorization posterior_factorization(std::span<const Count> x,
                                               std::span<const Count> y,
                                               const AggregationScheme& scheme,
                                               const DirichletPrior& prior) {
  scheme.require_disjoint("posterior_factorization");
  check_partial(x, y, scheme, prior);
  PosteriorFactorization post;
  post.tau_params.resize(scheme.group_count());
  post.rho_params.resize(scheme.group_count());
  for (std::size_t j = 0; j < scheme.group_count(); ++j) {
    double param = static_cast<double>(y[j]);
    for (Index i : scheme.group(j)) {
      const double block = prior[i] + static_cast<double>(x[i]);
      post.rho_params[j].push_back(block);
      param += block;
    }
    post.tau_params[j] = param;
  }
  return post;
}

double kl_loss(std::span<const double> estimate, std::span<const double> truth) {
  if (estimate.size() != truth.size()) {
    throw Error(ErrorCode::DimensionMismatch, "KL loss arguments differ in length");
  }
  double loss = 0.0;
  for (Index i = 0; i < truth.size(); ++i) {
    if (!(truth[i] >= kLogGuard) || !(estimate[i] >= kLogGuard)) {
      throw Error(ErrorCode::NonpositiveEntry,
                  "KL loss needs strictly positive entries (index " + std::to_string(i + 1) + ")");
    }
    loss += truth[i] * std::log(truth[i] / estimate[i]);
  }
  // Gibbs' inequality; clear tiny negative rounding.
  return loss < 0.0 ? 0.0 : loss;
}

}  // namespace pcbayes
