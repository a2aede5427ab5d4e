#ifndef CAN_RNG_HPP_
#define CAN_RNG_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

namespace can {

// splitmix64: fixed-increment counter generator with an avalanche output
// mix. Integer state plus IEEE double arithmetic keeps every stream
// bitwise reproducible across platforms; streams for (seed, a, b) are
// derived by hashing so parallel consumers never share state.
inline constexpr const char* kRngAlgorithm = "splitmix64";

struct SplitMix64 {
  std::uint64_t state = 0;

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline SplitMix64 derive_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  SplitMix64 g{seed};
  std::uint64_t h = g.next();
  g.state = h ^ (a * 0xD6E8FEB86659FD93ULL);
  h = g.next();
  g.state = h ^ (b * 0xA3B195354A39B70DULL);
  return SplitMix64{g.next()};
}

// Flat Dirichlet draw: normalized unit exponentials.
inline std::vector<double> sample_dirichlet(std::size_t m, SplitMix64& rng) {
  std::vector<double> v(m);
  double sum = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    v[i] = -std::log1p(-rng.next_double());
    sum += v[i];
  }
  if (sum == 0.0) {
    // all draws hit exactly zero; fall back to uniform
    for (double& x : v) x = 1.0 / static_cast<double>(m);
    return v;
  }
  for (double& x : v) x /= sum;
  return v;
}

}  // namespace can

#endif  // CAN_RNG_HPP_
