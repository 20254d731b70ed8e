#pragma once

// Enumeration, ranking and sampling of non-empty feature subsets in one
// canonical order: size-ascending, lexicographic within equal size.
//
//   F = 3:  {0}, {1}, {2}, {0,1}, {0,2}, {1,2}, {0,1,2}
//
// Ranks are 64-bit, which limits feature_count to 63. Sampling draws a
// uniform rank and unranks it, so every non-empty subset is exactly equally
// likely and the empty set can never occur.

#include "binotab/rng.hpp"

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

// Non-empty subset of 0-based feature indices, strictly increasing.
struct FeatureCombination {
  std::vector<std::size_t> indices;

  bool operator==(const FeatureCombination&) const = default;
};

inline constexpr std::size_t kMaxFeatureCount = 63;

namespace detail {

// Pascal's triangle up to n = 64; every entry fits in 64 bits.
inline const std::array<std::array<std::uint64_t, 65>, 65>& binomial_table() {
  static const auto table = [] {
    std::array<std::array<std::uint64_t, 65>, 65> t{};
    for (std::size_t n = 0; n <= 64; ++n) {
      t[n][0] = 1;
      for (std::size_t k = 1; k <= n; ++k) {
        t[n][k] = t[n - 1][k - 1] + (k <= n - 1 ? t[n - 1][k] : 0);
      }
    }
    return t;
  }();
  return table;
}

inline void check_feature_count(std::size_t feature_count) {
  if (feature_count == 0) throw std::invalid_argument("no features");
  if (feature_count > kMaxFeatureCount) {
    throw std::invalid_argument("feature_count " + std::to_string(feature_count) +
                                " exceeds the 64-bit rank limit of " +
                                std::to_string(kMaxFeatureCount));
  }
}

}  // namespace detail

inline std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (n > 64) throw std::invalid_argument("binomial: n must be <= 64");
  if (k > n) return 0;
  return detail::binomial_table()[n][k];
}

// Number of non-empty subsets: 2^feature_count - 1.
inline std::uint64_t total_combinations(std::size_t feature_count) {
  detail::check_feature_count(feature_count);
  if (feature_count == 63) return ~0ull >> 1;  // 2^63 - 1
  return (1ull << feature_count) - 1;
}

// rank-th combination in canonical order.
inline FeatureCombination unrank(std::size_t feature_count, std::uint64_t rank) {
  const std::uint64_t total = total_combinations(feature_count);
  if (rank >= total) {
    throw std::out_of_range("unrank: rank " + std::to_string(rank) +
                            " out of range for " + std::to_string(total) +
                            " combinations");
  }
  std::uint64_t r = rank;
  std::size_t k = 1;
  while (r >= binomial(feature_count, k)) {
    r -= binomial(feature_count, k);
    ++k;
  }
  // Lexicographic unranking of the r-th k-subset of {0..feature_count-1}.
  FeatureCombination combo;
  combo.indices.reserve(k);
  std::size_t candidate = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    for (;; ++candidate) {
      const std::uint64_t block = binomial(feature_count - 1 - candidate, k - 1 - slot);
      if (r < block) break;
      r -= block;
    }
    combo.indices.push_back(candidate);
    ++candidate;
  }
  return combo;
}

// Inverse of unrank.
inline std::uint64_t rank_of(std::size_t feature_count, const FeatureCombination& combo) {
  detail::check_feature_count(feature_count);
  const std::size_t k = combo.indices.size();
  if (k == 0 || k > feature_count) {
    throw std::invalid_argument("rank_of: combination size out of range");
  }
  std::uint64_t rank = 0;
  for (std::size_t size = 1; size < k; ++size) rank += binomial(feature_count, size);
  std::size_t prev = 0;
  for (std::size_t slot = 0; slot < k; ++slot) {
    const std::size_t value = combo.indices[slot];
    if (value >= feature_count || (slot > 0 && value < prev)) {
      throw std::invalid_argument("rank_of: indices must be strictly increasing and < feature_count");
    }
    for (std::size_t smaller = prev; smaller < value; ++smaller) {
      rank += binomial(feature_count - 1 - smaller, k - 1 - slot);
    }
    prev = value + 1;
  }
  return rank;
}

// First min(limit, total) combinations in canonical order.
inline std::vector<FeatureCombination> enumerate_prefix(std::size_t feature_count,
                                                        std::size_t limit) {
  const std::uint64_t total = total_combinations(feature_count);
  if (limit == 0) throw std::invalid_argument("enumerate_prefix: limit must be >= 1");
  const std::uint64_t count = limit < total ? limit : total;
  std::vector<FeatureCombination> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<std::size_t> state;
  for (std::size_t k = 1; k <= feature_count && out.size() < count; ++k) {
    // First k-subset, then standard lexicographic successor.
    state.resize(k);
    for (std::size_t i = 0; i < k; ++i) state[i] = i;
    for (;;) {
      out.push_back(FeatureCombination{state});
      if (out.size() == count) break;
      std::size_t i = k;
      while (i > 0 && state[i - 1] == feature_count - k + (i - 1)) --i;
      if (i == 0) break;
      ++state[i - 1];
      for (std::size_t j = i; j < k; ++j) state[j] = state[j - 1] + 1;
    }
  }
  return out;
}

// n independent uniform draws over all non-empty subsets; duplicates allowed.
inline std::vector<FeatureCombination> sample_random(std::size_t feature_count,
                                                     std::size_t n,
                                                     std::uint64_t seed) {
  const std::uint64_t total = total_combinations(feature_count);
  if (n == 0) throw std::invalid_argument("sample_random: n must be >= 1");
  Rng rng(seed);
  std::vector<FeatureCombination> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(unrank(feature_count, uniform_u64(rng, total)));
  }
  return out;
}

}  // namespace binotab
