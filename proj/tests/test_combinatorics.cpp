#include "binotab/combinatorics.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <vector>

using namespace binotab;

namespace {

// Brute-force oracle: every non-empty subset of {0..f-1} via bitmasks,
// sorted by (size, lexicographic indices). Independent of unrank.
std::vector<std::vector<std::size_t>> all_subsets_sorted(std::size_t f) {
  std::vector<std::vector<std::size_t>> subsets;
  for (std::uint64_t mask = 1; mask < (1ull << f); ++mask) {
    std::vector<std::size_t> indices;
    for (std::size_t i = 0; i < f; ++i) {
      if (mask & (1ull << i)) indices.push_back(i);
    }
    subsets.push_back(std::move(indices));
  }
  std::sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return subsets;
}

}  // namespace

TEST_CASE("total_combinations counts non-empty subsets") {
  CHECK(total_combinations(1) == 1);
  CHECK(total_combinations(8) == 255);
  CHECK(total_combinations(14) == 16383);
  CHECK(total_combinations(31) == 2147483647ull);
  CHECK(total_combinations(63) == 9223372036854775807ull);
  CHECK_THROWS_WITH(total_combinations(0), Catch::Matchers::ContainsSubstring("no features"));
  CHECK_THROWS_AS(total_combinations(64), std::invalid_argument);
}

TEST_CASE("unrank walks the canonical order") {
  CHECK(unrank(3, 0) == FeatureCombination{{0}});
  CHECK(unrank(3, 3) == FeatureCombination{{0, 1}});
  CHECK(unrank(3, 6) == FeatureCombination{{0, 1, 2}});
  CHECK_THROWS_AS(unrank(3, 7), std::out_of_range);
}

TEST_CASE("enumerate_prefix equals the brute-force oracle for small F") {
  for (std::size_t f = 1; f <= 10; ++f) {
    const auto expected = all_subsets_sorted(f);
    const auto got = enumerate_prefix(f, static_cast<std::size_t>(total_combinations(f)));
    REQUIRE(got.size() == expected.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].indices == expected[i]);
    }
  }
}

TEST_CASE("enumerate_prefix truncates and saturates") {
  CHECK(enumerate_prefix(3, 100).size() == 7);
  CHECK(enumerate_prefix(14, 16383).size() == 16383);
  CHECK_THROWS_AS(enumerate_prefix(3, 0), std::invalid_argument);

  const auto prefix = enumerate_prefix(30, 100000);
  REQUIRE(prefix.size() == 100000);
  CHECK(prefix.back() == unrank(30, 99999));
  CHECK(prefix[12345] == unrank(30, 12345));
}

TEST_CASE("rank_of inverts unrank exhaustively for F <= 12") {
  for (std::size_t f = 1; f <= 12; ++f) {
    const std::uint64_t total = total_combinations(f);
    for (std::uint64_t r = 0; r < total; ++r) {
      CHECK(rank_of(f, unrank(f, r)) == r);
    }
  }
}

TEST_CASE("rank/unrank roundtrip spot checks for larger F") {
  for (const std::uint64_t r : {0ull, 1ull, 999ull, 16382ull, 123456789ull, 2147483646ull}) {
    CHECK(rank_of(31, unrank(31, r)) == r);
  }
  CHECK(rank_of(63, unrank(63, 9223372036854775806ull)) == 9223372036854775806ull);
}

TEST_CASE("canonical order is size-ascending then lexicographic") {
  const auto combos = enumerate_prefix(6, static_cast<std::size_t>(total_combinations(6)));
  for (std::size_t i = 1; i < combos.size(); ++i) {
    const auto& prev = combos[i - 1].indices;
    const auto& cur = combos[i].indices;
    const bool ordered =
        prev.size() < cur.size() || (prev.size() == cur.size() && prev < cur);
    CHECK(ordered);
  }
}

TEST_CASE("sample_random draws non-empty subsets deterministically") {
  const auto a = sample_random(8, 20000, 42);
  const auto b = sample_random(8, 20000, 42);
  REQUIRE(a.size() == 20000);
  CHECK(a == b);
  for (const auto& combo : a) {
    REQUIRE(!combo.indices.empty());
    REQUIRE(combo.indices.size() <= 8);
    for (std::size_t i = 1; i < combo.indices.size(); ++i) {
      CHECK(combo.indices[i - 1] < combo.indices[i]);
    }
    CHECK(combo.indices.back() < 8);
  }
  CHECK(sample_random(8, 20000, 43) != a);
}

TEST_CASE("single feature admits a single subset") {
  const auto combos = sample_random(1, 5, 7);
  REQUIRE(combos.size() == 5);
  for (const auto& combo : combos) CHECK(combo == FeatureCombination{{0}});
}

TEST_CASE("uniform sampling includes each feature about half the time") {
  // Each feature appears with probability 2^19 / (2^20 - 1), about 0.5.
  const std::size_t f = 20;
  const std::size_t n = 100000;
  const auto combos = sample_random(f, n, 20230501);
  std::vector<std::size_t> counts(f, 0);
  for (const auto& combo : combos) {
    for (std::size_t idx : combo.indices) ++counts[idx];
  }
  for (std::size_t i = 0; i < f; ++i) {
    const double freq = static_cast<double>(counts[i]) / static_cast<double>(n);
    CHECK(freq == Catch::Approx(0.5).margin(0.01));
  }
}
