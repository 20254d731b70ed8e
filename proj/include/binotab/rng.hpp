#pragma once

// Deterministic random streams. Everything stochastic in the library goes
// through these helpers: std::mt19937_64 has a standard-specified output
// sequence, while std::uniform_int_distribution and std::shuffle do not,
// so a fixed seed reproduces bit-identical runs on any platform.

#include <bit>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace binotab {

using Rng = std::mt19937_64;

inline std::uint64_t hash_name(std::string_view name) {
  // FNV-1a
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Seed of a named sub-stream. Keeps e.g. the batch sampler and the weight
// init of one run on independent streams, so enabling one feature does not
// perturb the draws of another.
inline std::uint64_t derive_seed(std::uint64_t base_seed, std::string_view stream) {
  return splitmix64(base_seed ^ hash_name(stream));
}

inline Rng make_rng(std::uint64_t base_seed, std::string_view stream) {
  return Rng(derive_seed(base_seed, stream));
}

// Unbiased integer in [0, bound) via masked rejection.
inline std::uint64_t uniform_u64(Rng& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t mask =
      bound > (1ull << 63) ? ~0ull : std::bit_ceil(bound) - 1;
  for (;;) {
    const std::uint64_t v = rng() & mask;
    if (v < bound) return v;
  }
}

// Double in [0, 1) with 53 random bits.
inline double uniform_real(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_in(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform_real(rng);
}

// Fisher-Yates with the deterministic bounded sampler above.
template <typename T>
void shuffle(std::vector<T>& values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(uniform_u64(rng, i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace binotab
