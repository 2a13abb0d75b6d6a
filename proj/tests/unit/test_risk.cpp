#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "pcbayes/risk.hpp"

using namespace pcbayes;

namespace {

double g_oracle(double theta, Count n, double alpha) {
  double sum = 0.0;
  for (Count x = 0; x <= n; ++x) {
    const double logp = std::lgamma(n + 1.0) - std::lgamma(x + 1.0) - std::lgamma(n - x + 1.0) +
                        x * std::log(theta) + (n - x) * std::log1p(-theta);
    sum += std::exp(logp) * std::log((1.0 + x + alpha) / (x + alpha));
  }
  return theta * theta * sum;
}

const AggregationScheme& setting_i() {
  static const auto s = validate_scheme({{1, 2}}, 3);
  return s;
}

const AggregationScheme& setting_ii() {
  static const auto s = validate_scheme({{4, 5, 6, 7, 8}}, 9);
  return s;
}

const AggregationScheme& k4() {
  static const auto s = validate_scheme({{0, 1}, {2, 3}}, 4);
  return s;
}

}  // namespace

TEST_CASE("estimator kind names") {
  CHECK(parse_estimator_kind("closed") == EstimatorKind::WithPartialClosed);
  CHECK(parse_estimator_kind("gibbs") == EstimatorKind::WithPartialGibbs);
  CHECK(parse_estimator_kind("full_only") == EstimatorKind::FullOnly);
  CHECK(parse_estimator_kind(to_string(EstimatorKind::WithPartialGibbs)) ==
        EstimatorKind::WithPartialGibbs);
  CHECK_THROWS_AS(parse_estimator_kind("mle"), Error);
}

TEST_CASE("no aggregated data means zero risk difference on every draw") {
  SimulationSetting st{k4(), DirichletPrior::uniform(4), ProbabilityVector({0.1, 0.2, 0.3, 0.4}),
                       30, 0, 500, 9, std::nullopt};
  for (auto kind : {EstimatorKind::WithPartialClosed, EstimatorKind::WithPartialGibbs}) {
    const auto r = simulate_risk(st, kind);
    CHECK(r.delta.value == 0.0);
    CHECK(r.delta.se == 0.0);
    CHECK(r.risk_hat.value == r.risk_tilde.value);
    CHECK_FALSE(r.dominance_flag);
  }
  const auto b = bayes_risk({k4(), DirichletPrior::jeffreys(4), 30, 0, 500, 9, std::nullopt},
                            EstimatorKind::WithPartialClosed);
  CHECK(b.delta.value == 0.0);
  CHECK(b.bayes_risk);
}

TEST_CASE("setting settings are validated") {
  SimulationSetting st{k4(), DirichletPrior::uniform(4), ProbabilityVector::uniform(4), 10, 10, 99,
                       0, std::nullopt};
  CHECK_THROWS_AS(simulate_risk(st, EstimatorKind::WithPartialClosed), Error);
  st.replications = 100;
  st.theta = ProbabilityVector({0.0, 0.5, 0.25, 0.25});
  CHECK_THROWS_AS(simulate_risk(st, EstimatorKind::WithPartialClosed), Error);

  const auto overlap = validate_scheme({{0, 1}, {1, 2}}, 3);
  SimulationSetting ov{overlap, DirichletPrior::jeffreys(3), ProbabilityVector::uniform(3), 10, 10,
                       100, 0, std::nullopt};
  try {
    simulate_risk(ov, EstimatorKind::WithPartialGibbs);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingSchemeWithoutReportingMap);
  }
  ov.reporting = ReportingMap::lowest_index(overlap);
  try {
    simulate_risk(ov, EstimatorKind::WithPartialClosed);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OverlappingSchemeUnsupported);
  }
}

TEST_CASE("exact risk difference matches independent values") {
  const auto jeff3 = DirichletPrior::jeffreys(3);
  const auto jeff9 = DirichletPrior::jeffreys(9);
  const auto u3 = ProbabilityVector::uniform(3);
  const auto u9 = ProbabilityVector::uniform(9);
  CHECK(exact_risk_difference(u3, setting_i(), jeff3, 1, 2) ==
        doctest::Approx(0.009882382653002564).epsilon(1e-10));
  CHECK(exact_risk_difference(u3, setting_i(), jeff3, 50, 50) ==
        doctest::Approx(-0.004846152253965508).epsilon(1e-10));
  CHECK(exact_risk_difference(u9, setting_ii(), jeff9, 100, 2000) ==
        doctest::Approx(-0.004407659022900745).epsilon(1e-9));
  CHECK(exact_risk_difference(ProbabilityVector::uniform(4), k4(), DirichletPrior::uniform(4), 20,
                              3) == doctest::Approx(-0.0017642622533944469).epsilon(1e-10));
  CHECK(exact_risk_difference(u3, setting_i(), jeff3, 10, 0) == 0.0);
}

TEST_CASE("setting (i) witness: positive risk difference at small N'") {
  // Pinned: theta_1, N = 1, N' = 2 under Jeffreys.
  SimulationSetting st{setting_i(), DirichletPrior::jeffreys(3), ProbabilityVector::uniform(3), 1, 2,
                       100000, 0, std::nullopt};
  const auto r = simulate_risk(st, EstimatorKind::WithPartialClosed);
  CHECK(r.delta.value > 2.0 * r.delta.se);
  CHECK(std::abs(r.delta.value - 0.009882382653002564) <= 3.0 * r.delta.se);
}

TEST_CASE("monte carlo risk difference agrees with the exact sum") {
  random::Engine rng(41);
  for (int t = 0; t < 8; ++t) {
    const std::size_t k = gen::uniform_int(rng, 2, 6);
    const auto s = gen::disjoint_scheme(rng, k);
    auto theta = gen::simplex_point(rng, k);
    for (auto& v : theta) v = 0.5 * v + 0.5 / k;
    const auto prior = gen::prior(rng, k);
    const Count n = static_cast<Count>(gen::uniform_int(rng, 1, 40));
    const Count np = static_cast<Count>(gen::uniform_int(rng, 1, 40));
    SimulationSetting st{s, prior, ProbabilityVector(theta), n, np, 20000,
                         static_cast<std::uint64_t>(t), std::nullopt};
    const auto r = simulate_risk(st, EstimatorKind::WithPartialClosed);
    const double exact = exact_risk_difference(ProbabilityVector(theta), s, prior, n, np);
    INFO("case " << t << " mc " << r.delta.value << " exact " << exact << " se " << r.delta.se);
    CHECK(std::abs(r.delta.value - exact) <= 4.0 * r.delta.se + 1e-12);
    CHECK(r.risk_hat.value >= 0.0);
    CHECK(r.risk_tilde.value >= 0.0);
  }
}

TEST_CASE("reports do not depend on the thread count") {
  SimulationSetting st{k4(), DirichletPrior::uniform(4), ProbabilityVector({0.1, 0.2, 0.3, 0.4}),
                       20, 15, 2000, 5, std::nullopt};
  RiskOptions one, four;
  four.threads = 4;
  for (auto kind : {EstimatorKind::WithPartialClosed, EstimatorKind::WithPartialGibbs}) {
    const auto a = simulate_risk(st, kind, one);
    const auto b = simulate_risk(st, kind, four);
    CHECK(a.delta.value == b.delta.value);
    CHECK(a.risk_hat.se == b.risk_hat.se);
  }
}

TEST_CASE("theta_star examples") {
  const auto a = theta_star(validate_scheme({{0, 1}, {2, 3}, {4, 5}}, 6));
  for (double v : a) CHECK(v == doctest::Approx(1.0 / 6));
  const auto b = theta_star(validate_scheme({{0}, {1, 2}}, 3));
  CHECK(b.values() == std::vector<double>{0.5, 0.25, 0.25});
  const auto s = validate_scheme({{0, 1, 2}, {3}, {4, 5}}, 6);
  for (double m : group_mass(theta_star(s).span(), s)) CHECK(m == doctest::Approx(1.0 / 3));
  CHECK_THROWS_AS(theta_star(validate_scheme({{0, 1}, {1, 2}}, 3)), Error);
}

TEST_CASE("g_function against direct summation") {
  CHECK(g_function(0.5, 0, 2.0) == doctest::Approx(-0.25 * std::log(1.0 - 1.0 / 3.0)).epsilon(1e-14));
  CHECK(g_function(0.3, 10, 2.0) == doctest::Approx(0.017734236018690598).epsilon(1e-12));
  for (double a : {0.5, 2.0, 7.5})
    for (Count n : {0, 1, 25, 400})
      for (double t : {0.01, 0.2, 0.5, 0.93}) {
        CHECK(g_function(t, n, a) == doctest::Approx(g_oracle(t, n, a)).epsilon(1e-11));
        CHECK(g_function(t, n, a) > 0.0);
      }
  CHECK_THROWS_AS(g_function(0.0, 10, 2.0), Error);
  CHECK_THROWS_AS(g_function(1.0, 10, 2.0), Error);
  CHECK_THROWS_AS(g_function(0.5, 10, 0.0), Error);
}

TEST_CASE("single-observation difference: G identity equals the exact sum") {
  random::Engine rng(42);
  for (int t = 0; t < 50; ++t) {
    const std::size_t k = gen::uniform_int(rng, 2, 7);
    const auto s = gen::disjoint_scheme(rng, k);
    const ProbabilityVector theta(gen::simplex_point(rng, k));
    const auto prior = gen::prior(rng, k);
    const Count n = static_cast<Count>(gen::uniform_int(rng, 0, 60));
    CHECK(delta_single_exact(theta, s, prior, n) ==
          doctest::Approx(exact_risk_difference(theta, s, prior, n, 1)).epsilon(1e-9));
  }
  CHECK(delta_theta_star_exact(k4(), DirichletPrior::uniform(4), 50) ==
        doctest::Approx(-0.00015147708679259103).epsilon(1e-9));
}

TEST_CASE("delta at theta* agrees with simulation at N' = 1") {
  const auto prior = DirichletPrior::uniform(4);
  SimulationSetting st{k4(), prior, theta_star(k4()), 50, 1, 200000, 3, std::nullopt};
  const auto r = simulate_risk(st, EstimatorKind::WithPartialClosed);
  const double exact = delta_theta_star_exact(k4(), prior, 50);
  INFO("mc " << r.delta.value << " se " << r.delta.se << " exact " << exact);
  CHECK(std::abs(r.delta.value - exact) <= 3.0 * r.delta.se);
}

TEST_CASE("dominance condition examples") {
  const auto ii = dominance_condition(DirichletPrior::jeffreys(9), setting_ii());
  CHECK(ii.satisfied);
  CHECK(ii.group_alpha == std::vector<double>{2.0, 2.5});
  CHECK_FALSE(ii.explanation.empty());
  const auto i = dominance_condition(DirichletPrior::jeffreys(3), setting_i());
  CHECK_FALSE(i.satisfied);
  CHECK(i.group_alpha == std::vector<double>{0.5, 1.0});
  CHECK(dominance_condition(DirichletPrior::uniform(6), validate_scheme({{0, 1}, {2, 3}, {4, 5}}, 6))
            .satisfied);
}

TEST_CASE("decomposition check edge cases") {
  const auto prior = DirichletPrior::uniform(4);
  const auto theta = ProbabilityVector::uniform(4);
  const auto one = risk_difference_decomposition_check(theta, k4(), prior, 20, 1, 5000, 3);
  REQUIRE(one.terms.size() == 1);
  CHECK(one.lhs.value == one.rhs.value);
  CHECK(one.consistent);
  const auto zero = risk_difference_decomposition_check(theta, k4(), prior, 20, 0, 5000, 3);
  CHECK(zero.terms.empty());
  CHECK(zero.lhs.value == 0.0);
  CHECK(zero.rhs.value == 0.0);
  CHECK(zero.consistent);
}

TEST_CASE("simplex lattice") {
  // Interior points of step 1/n on the k-simplex: C(n-1, k-1).
  CHECK(simplex_lattice(3, 0.25).size() == 3);
  CHECK(simplex_lattice(4, 0.05).size() == 969);
  for (const auto& p : simplex_lattice(4, 0.1)) {
    double sum = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      sum += v;
    }
    CHECK(sum == doctest::Approx(1.0));
  }
  try {
    simplex_lattice(8, 0.01);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GridTooLarge);
  }
}

TEST_CASE("worst-case check is skipped when the condition fails") {
  const auto r = worst_case_check(setting_i(), DirichletPrior::jeffreys(3), 50, 0.1, 1000, 0);
  CHECK(r.skipped);
  CHECK_FALSE(r.explanation.empty());
}

TEST_CASE("dominance flag at theta* settles for large N'") {
  // Setting (ii) passes the condition; sweep N' upward until the flag fires
  // and confirm it stays on for three further doublings.
  const auto prior = DirichletPrior::jeffreys(9);
  const auto star = theta_star(setting_ii());
  Count np = 1;
  bool fired = false;
  for (; np <= 4096 && !fired; np *= 2) {
    SimulationSetting st{setting_ii(), prior, star, 20, np, 4000, 1, std::nullopt};
    fired = simulate_risk(st, EstimatorKind::WithPartialClosed).dominance_flag;
  }
  REQUIRE(fired);
  for (int d = 0; d < 3; ++d, np *= 2) {
    SimulationSetting st{setting_ii(), prior, star, 20, np, 4000, 1, std::nullopt};
    CHECK(simulate_risk(st, EstimatorKind::WithPartialClosed).dominance_flag);
  }
}
