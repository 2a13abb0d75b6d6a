#include "pcbayes/random.hpp"

#include <algorithm>
#include <cmath>

namespace pcbayes::random {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

// log(k!) minus its Stirling approximation.
double stirling_tail(double k) noexcept {
  static constexpr double kTail[] = {
      0.0810614667953272,  0.0413406959554092,  0.0276779256849983, 0.02079067210376509,
      0.0166446911898211,  0.0138761288230707,  0.0118967099458917, 0.0104112652619720,
      0.00925546218271273, 0.00833056343336287,
  };
  if (k <= 9) return kTail[static_cast<int>(k)];
  const double kp1sq = (k + 1) * (k + 1);
  return (1.0 / 12 - (1.0 / 360 - 1.0 / 1260 / kp1sq) / kp1sq) / (k + 1);
}

Count binomial_inversion(Engine& rng, Count n, double p) {
  const double q = 1.0 - p;
  const double s = p / q;
  const double a = static_cast<double>(n + 1) * s;
  for (;;) {
    double r = std::pow(q, static_cast<double>(n));
    double u = uniform01(rng);
    Count x = 0;
    while (u > r) {
      u -= r;
      ++x;
      if (x > n) break;
      r *= a / static_cast<double>(x) - s;
    }
    // Rounding can leave u above the accumulated mass; redraw.
    if (x <= n) return x;
  }
}

// Hormann (1993), "The generation of binomial random variates", algorithm BTRS.
Count binomial_btrs(Engine& rng, Count n, double p) {
  const double nd = static_cast<double>(n);
  const double spq = std::sqrt(nd * p * (1.0 - p));
  const double b = 1.15 + 2.53 * spq;
  const double a = -0.0873 + 0.0248 * b + 0.01 * p;
  const double c = nd * p + 0.5;
  const double v_r = 0.92 - 4.2 / b;
  const double r = p / (1.0 - p);
  const double alpha = (2.83 + 5.1 / b) * spq;
  const double m = std::floor((nd + 1) * p);
  for (;;) {
    const double u = uniform01(rng) - 0.5;
    double v = uniform01(rng);
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2 * a / us + b) * u + c);
    if (k < 0 || k > nd) continue;
    if (us >= 0.07 && v <= v_r) return static_cast<Count>(k);
    v = std::log(v * alpha / (a / (us * us) + b));
    const double bound = (m + 0.5) * std::log((m + 1) / (r * (nd - m + 1))) +
                         (nd + 1) * std::log((nd - m + 1) / (nd - k + 1)) +
                         (k + 0.5) * std::log(r * (nd - k + 1) / (k + 1)) + stirling_tail(m) +
                         stirling_tail(nd - m) - stirling_tail(k) - stirling_tail(nd - k);
    if (v <= bound) return static_cast<Count>(k);
  }
}

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) noexcept {
  for (auto& word : s_) word = splitmix64(seed);
}

Xoshiro256::result_type Xoshiro256::operator()() noexcept {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
  std::uint64_t state = base;
  const std::uint64_t h = splitmix64(state);
  state = h ^ (stream * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  return splitmix64(state);
}

double uniform01(Engine& rng) noexcept {
  // (top 53 bits + 0.5) / 2^53 lies strictly inside (0, 1).
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

double standard_normal(Engine& rng) noexcept {
  for (;;) {
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double v = 2.0 * uniform01(rng) - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
  }
}

double gamma(Engine& rng, double shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw Error(ErrorCode::NonpositiveEntry, "gamma shape must be finite and > 0");
  }
  if (shape < 1.0) {
    const double boost = std::pow(uniform01(rng), 1.0 / shape);
    return gamma(rng, shape + 1.0) * boost;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

Count binomial(Engine& rng, Count n, double p) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "binomial trials must be >= 0");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "binomial probability outside [0, 1]");
  }
  if (n == 0 || p == 0.0) return 0;
  if (p == 1.0) return n;
  if (p > 0.5) return n - binomial(rng, n, 1.0 - p);
  if (static_cast<double>(n) * p < 10.0) return binomial_inversion(rng, n, p);
  return binomial_btrs(rng, n, p);
}

void multinomial(Engine& rng, Count n, std::span<const double> prob, std::span<Count> out) {
  if (prob.size() != out.size() || prob.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "multinomial probability/output size mismatch");
  }
  double remaining = 0.0;
  for (double p : prob) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::InvalidArgument, "multinomial probabilities must be >= 0");
    }
    remaining += p;
  }
  if (!(remaining > 0.0)) {
    throw Error(ErrorCode::DegenerateGroup, "multinomial probabilities sum to zero");
  }
  std::size_t last = prob.size() - 1;
  while (prob[last] <= 0.0) --last;
  Count left = n;
  for (std::size_t i = 0; i < last; ++i) {
    if (left == 0 || prob[i] <= 0.0) {
      out[i] = 0;
    } else {
      const double conditional = prob[i] >= remaining ? 1.0 : prob[i] / remaining;
      out[i] = binomial(rng, left, conditional);
      left -= out[i];
    }
    remaining -= prob[i];
  }
  out[last] = left;
  for (std::size_t i = last + 1; i < out.size(); ++i) out[i] = 0;
}

void dirichlet(Engine& rng, std::span<const double> alpha, std::span<double> out) {
  if (alpha.size() != out.size() || alpha.empty()) {
    throw Error(ErrorCode::DimensionMismatch, "dirichlet parameter/output size mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    out[i] = gamma(rng, alpha[i]);
    sum += out[i];
  }
  if (!(sum > 0.0)) {
    // Every gamma underflowed; only possible with tiny alphas.
    for (double& v : out) v = 1.0;
    sum = static_cast<double>(out.size());
  }
  double clamped_sum = 0.0;
  for (double& v : out) {
    v = std::max(v / sum, kDirichletFloor);
    clamped_sum += v;
  }
  for (double& v : out) v /= clamped_sum;
}

}  // namespace pcbayes::random
