#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "pcbayes/estimator.hpp"

using namespace pcbayes;

namespace {

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < got.size(); ++i) {
    INFO("coordinate " << i);
    CHECK(std::abs(got[i] - want[i]) <= tol);
  }
}

const AggregationScheme& k4_scheme() {
  static const auto s = validate_scheme({{0, 1}, {2, 3}}, 4);
  return s;
}

}  // namespace

TEST_CASE("bayes_full_only examples") {
  check_close(bayes_full_only(CountVector{0, 0}, DirichletPrior::uniform(2)).values(), {0.5, 0.5}, 1e-15);
  check_close(bayes_full_only(CountVector{3, 1}, DirichletPrior::uniform(2)).values(),
              {2.0 / 3.0, 1.0 / 3.0}, 1e-15);
  check_close(bayes_full_only(CountVector{5, 5}, DirichletPrior::symmetric(2, 2.0)).values(),
              {0.5, 0.5}, 1e-15);
  CHECK_THROWS_AS(bayes_full_only(CountVector{1, 2, 3}, DirichletPrior::uniform(2)), Error);
}

TEST_CASE("bayes_with_partial on the four-category example") {
  // (alpha+x) = (3,2,2,1); group sums 5 and 3; group posterior masses 8/12, 4/12.
  const auto t = bayes_with_partial(CountVector{2, 1, 1, 0}, CountVector{3, 1}, k4_scheme(),
                                    DirichletPrior::uniform(4));
  check_close(t.values(), {3.0 / 5 * 8 / 12, 2.0 / 5 * 8 / 12, 2.0 / 3 * 4 / 12, 1.0 / 3 * 4 / 12},
              1e-15);
  check_close(t.values(), {0.4, 0.2667, 0.2222, 0.1111}, 5e-5);
}

TEST_CASE("bayes_with_partial symmetric example") {
  check_close(bayes_with_partial(CountVector{1, 1, 1, 1}, CountVector{2, 2}, k4_scheme(),
                                 DirichletPrior::uniform(4))
                  .values(),
              {0.25, 0.25, 0.25, 0.25}, 1e-15);
}

TEST_CASE("bayes_with_partial rejects overlapping schemes and bad shapes") {
  const auto overlap = validate_scheme({{0, 1}, {1, 2}}, 3);
  try {
    bayes_with_partial(CountVector{1, 1, 1}, CountVector{1, 1}, overlap, DirichletPrior::uniform(3));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingSchemeUnsupported);
  }
  CHECK_THROWS_AS(bayes_with_partial(CountVector{1, 1, 1, 1}, CountVector{1, 1, 1}, k4_scheme(),
                                     DirichletPrior::uniform(4)),
                  Error);
}

TEST_CASE("posterior_factorization on the four-category example") {
  const auto f = posterior_factorization(CountVector{2, 1, 1, 0}, CountVector{3, 1}, k4_scheme(),
                                         DirichletPrior::uniform(4));
  CHECK(f.tau_params == std::vector<double>{8.0, 4.0});
  REQUIRE(f.rho_params.size() == 2);
  CHECK(f.rho_params[0] == std::vector<double>{3.0, 2.0});
  CHECK(f.rho_params[1] == std::vector<double>{2.0, 1.0});
  check_close(f.theta_mean(k4_scheme()), {0.4, 4.0 / 15, 2.0 / 9, 1.0 / 9}, 1e-15);
}

TEST_CASE("posterior_factorization with no data is the prior") {
  const auto s = validate_scheme({{0}, {1, 2}}, 3);
  const DirichletPrior prior({0.5, 1.5, 2.0});
  const auto f = posterior_factorization(CountVector{0, 0, 0}, CountVector{0, 0}, s, prior);
  CHECK(f.tau_params == std::vector<double>{0.5, 3.5});
  CHECK(f.rho_params[0] == std::vector<double>{0.5});
  CHECK(f.rho_params[1] == std::vector<double>{1.5, 2.0});
}

TEST_CASE("factorization means reproduce the closed form on random inputs") {
  random::Engine rng(21);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = gen::uniform_int(rng, 2, 10);
    const auto s = gen::disjoint_scheme(rng, k);
    const auto x = gen::counts(rng, k, 50);
    const auto y = gen::counts(rng, s.group_count(), 80);
    const auto prior = gen::prior(rng, k);
    check_close(posterior_factorization(x, y, s, prior).theta_mean(s),
                bayes_with_partial(x, y, s, prior).values(), 1e-12);
  }
}

TEST_CASE("group-mass identity") {
  random::Engine rng(22);
  for (int t = 0; t < 500; ++t) {
    const std::size_t k = gen::uniform_int(rng, 2, 10);
    const auto s = gen::disjoint_scheme(rng, k);
    const auto x = gen::counts(rng, k, 50);
    const auto y = gen::counts(rng, s.group_count(), 80);
    const auto prior = gen::prior(rng, k);
    const auto theta = bayes_with_partial(x, y, s, prior);
    const auto mass = group_mass(theta.span(), s);
    const auto ga = prior.group_alpha(s);
    const auto xa = aggregate(x, s);
    const double denom = static_cast<double>(total(x) + total(y)) + prior.alpha_sum();
    for (std::size_t j = 0; j < s.group_count(); ++j) {
      CHECK(mass[j] == doctest::Approx((y[j] + ga[j] + xa[j]) / denom).epsilon(1e-12));
    }
  }
}

TEST_CASE("kl_loss examples") {
  CHECK(kl_loss(ProbabilityVector({0.3, 0.7}), ProbabilityVector({0.3, 0.7})) == 0.0);
  const double want = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(kl_loss(ProbabilityVector({0.25, 0.75}), ProbabilityVector({0.5, 0.5})) ==
        doctest::Approx(want).epsilon(1e-14));
  CHECK(want == doctest::Approx(0.14384).epsilon(1e-4));
}

TEST_CASE("kl_loss guards non-positive entries") {
  try {
    kl_loss(ProbabilityVector({0.0, 1.0}), ProbabilityVector({0.5, 0.5}));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonpositiveEntry);
  }
  CHECK_THROWS_AS(kl_loss(ProbabilityVector({0.5, 0.5}), ProbabilityVector({1.0, 0.0})), Error);
}

TEST_CASE("kl_loss is non-negative and convex in the estimate") {
  random::Engine rng(23);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t k = gen::uniform_int(rng, 2, 8);
    const auto p = gen::simplex_point(rng, k);
    const auto q = gen::simplex_point(rng, k);
    const auto truth = gen::simplex_point(rng, k);
    CHECK(kl_loss(p, truth) >= 0.0);
    const double lambda = gen::uniform_real(rng, 0.0, 1.0);
    std::vector<double> mix(k);
    for (std::size_t i = 0; i < k; ++i) mix[i] = lambda * p[i] + (1 - lambda) * q[i];
    CHECK(kl_loss(mix, truth) <=
          lambda * kl_loss(p, truth) + (1 - lambda) * kl_loss(q, truth) + 1e-12);
  }
}
