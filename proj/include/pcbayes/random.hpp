#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "pcbayes/core.hpp"

namespace pcbayes::random {

/// xoshiro256** (Blackman & Vigna), seeded through splitmix64.
///
/// The standard library engines are portable but the standard distributions
/// are not, and mt19937_64 is slow to seed once per replication. Every
/// distribution below is implemented here so that a (seed, stream) pair yields
/// the same draws on every conforming platform.
class Xoshiro256 {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256(std::uint64_t seed = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

 private:
  std::uint64_t s_[4];
};

using Engine = Xoshiro256;

std::uint64_t splitmix64(std::uint64_t& state) noexcept;

/// Independent stream seed for (base, stream). Used for replication r,
/// cause row c, and so on; the result never depends on scheduling.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

inline Engine make_engine(std::uint64_t base, std::uint64_t stream) noexcept {
  return Engine(derive_seed(base, stream));
}

/// Uniform on the open interval (0, 1), 53-bit resolution.
double uniform01(Engine& rng) noexcept;

/// Marsaglia polar method.
double standard_normal(Engine& rng) noexcept;

/// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
double gamma(Engine& rng, double shape);

/// Binomial(n, p): inversion when n*min(p,1-p) < 10, BTRS otherwise.
Count binomial(Engine& rng, Count n, double p);

/// Multinomial(n, prob) by sequential conditional binomials. prob need not be
/// normalised; entries must be >= 0 with a positive sum.
void multinomial(Engine& rng, Count n, std::span<const double> prob, std::span<Count> out);

inline constexpr double kDirichletFloor = 1e-12;

/// Dirichlet(alpha) via normalised gammas. Entries are clamped below at
/// kDirichletFloor and renormalised so that no coordinate is exactly zero.
void dirichlet(Engine& rng, std::span<const double> alpha, std::span<double> out);

}  // namespace pcbayes::random
