#ifndef BAYESRL_RNG_HPP_
#define BAYESRL_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

// Deterministic random number generation.
//
// The generator and every sampling algorithm below are fixed by this header so
// that a (config, master seed) pair reproduces output byte-for-byte across
// runs and parallelism levels:
//   - streams:     PCG32 (O'Neill, PCG-XSH-RR 64/32),
//   - derivation:  SplitMix64 hash chain over (master seed, stream path),
//   - normal:      Marsaglia polar method with one cached deviate,
//   - gamma:       Marsaglia-Tsang squeeze (shape >= 1) with the
//                  Gamma(a) = Gamma(a+1) * U^(1/a) boost for shape < 1,
//   - dirichlet:   normalized independent gamma draws.
// Work units (prior draw, seed replicate) derive independent streams from the
// master seed by index, so results never depend on scheduling order.

namespace bayesrl {

// SplitMix64 step (Steele, Lea, Flood 2014); used only for seed mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t sequence = 0) {
    state_ = 0;
    inc_ = (sequence << 1u) | 1u;
    next_u32();
    state_ += seed;
    next_u32();
  }

  // Independent stream addressed by a path of indices under a master seed.
  // Equal (master, path) always yields the same stream; distinct paths give
  // streams with unrelated seeds and sequence constants.
  static Rng derive(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0,
                    std::uint64_t c = 0) {
    std::uint64_t s = master;
    std::uint64_t h1 = splitmix64(s);
    s ^= a * 0x9E3779B97F4A7C15ULL;
    std::uint64_t h2 = splitmix64(s);
    s ^= b * 0xC2B2AE3D27D4EB4FULL;
    std::uint64_t h3 = splitmix64(s);
    s ^= c * 0x165667B19E3779F9ULL;
    std::uint64_t h4 = splitmix64(s);
    return Rng(h1 ^ h3, h2 ^ h4);
  }

  std::uint32_t next_u32() {
    std::uint64_t old = state_;
    state_ = old * 6364136223846793005ULL + inc_;
    std::uint32_t xorshifted =
        static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
    std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
    return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
  }

  std::uint64_t next_u64() {
    std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [0, n); n must be positive.
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    // Rejection to avoid modulo bias.
    std::uint32_t bound = static_cast<std::uint32_t>(n);
    std::uint32_t threshold = (0u - bound) % bound;
    for (;;) {
      std::uint32_t r = next_u32();
      if (r >= threshold) return static_cast<int>(r % bound);
    }
  }

  // Standard normal deviate (Marsaglia polar, cached pair).
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
  }

  double normal(double mean, double variance) {
    return mean + std::sqrt(variance) * normal();
  }

  // Gamma(shape, scale 1) deviate; shape must be positive.
  double gamma(double shape) {
    if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
    if (shape < 1.0) {
      // Boost from shape + 1; u == 0 would underflow the power, redraw.
      double u;
      do {
        u = uniform();
      } while (u == 0.0);
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      double u = uniform();
      double xx = x * x;
      if (u < 1.0 - 0.0331 * xx * xx) return d * v;
      if (u > 0.0 && std::log(u) < 0.5 * xx + d * (1.0 - v + std::log(v))) {
        return d * v;
      }
    }
  }

  // Dirichlet draw: out[i] ~ Gamma(alpha[i]) normalized. If every component
  // underflows to zero (possible only for extreme concentrations) the draw
  // falls back to the uniform distribution to stay on the simplex.
  void dirichlet(std::span<const double> alpha, std::span<double> out) {
    if (alpha.size() != out.size() || alpha.empty()) {
      throw std::invalid_argument("dirichlet: size mismatch");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      out[i] = gamma(alpha[i]);
      total += out[i];
    }
    if (total <= 0.0) {
      double u = 1.0 / static_cast<double>(out.size());
      for (auto& x : out) x = u;
      return;
    }
    for (auto& x : out) x /= total;
  }

 private:
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 1;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bayesrl

#endif  // BAYESRL_RNG_HPP_
