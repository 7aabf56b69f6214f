#ifndef CUTSTACK_RNG_HPP
#define CUTSTACK_RNG_HPP

// Platform-independent random draws. std::mt19937_64 output is fixed by the
// standard, the distributions in <random> are not, so uniform draws are done
// here by rejection.

#include "exact.hpp"

#include <cstdint>
#include <random>

namespace cutstack {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream `index` derived from a master seed.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t index) {
  return Rng(splitmix64(master_seed ^ splitmix64(index + 0x5851F42D4C957F2Dull)));
}

/// Uniform integer in [0, bound), bound > 0.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw domain_error("uniform_below: empty range");
  std::uint64_t limit = bound * ((~std::uint64_t{0}) / bound);
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

/// Uniform big integer in [0, bound), bound > 0.
inline BigInt uniform_below(Rng& rng, const BigInt& bound) {
  if (sgn(bound) <= 0) throw domain_error("uniform_below: empty range");
  if (fits_u64(bound)) return big(uniform_below(rng, to_u64(bound)));
  std::size_t bits = bit_length(bound - 1);
  std::size_t words = (bits + 63) / 64;
  unsigned top_bits = static_cast<unsigned>(bits - 64 * (words - 1));
  std::uint64_t top_mask = top_bits == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << top_bits) - 1);
  for (;;) {
    BigInt x = 0;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t limb = rng();
      if (w == 0) limb &= top_mask;
      x = (x << 64) + big(limb);
    }
    if (x < bound) return x;
  }
}

/// Uniform big integer in [lo, hi].
inline BigInt uniform_between(Rng& rng, const BigInt& lo, const BigInt& hi) {
  if (hi < lo) throw domain_error("uniform_between: empty range");
  return lo + uniform_below(rng, BigInt(hi - lo + 1));
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace cutstack

#endif  // CUTSTACK_RNG_HPP
