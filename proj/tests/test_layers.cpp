#include "binotab/layers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace binotab;

namespace {

// Binomial-family construction contract: weights in {0,1}, at least one
// selected input per neuron, zero bias.
void check_binomial_invariants(const DenseLayer& layer) {
  for (std::size_t r = 0; r < layer.out_units(); ++r) {
    double row_sum = 0.0;
    for (std::size_t c = 0; c < layer.in_units(); ++c) {
      const double w = layer.weights(r, c);
      REQUIRE((w == 0.0 || w == 1.0));
      row_sum += w;
    }
    REQUIRE(row_sum >= 1.0);
    REQUIRE(row_sum <= static_cast<double>(layer.in_units()));
  }
  for (std::size_t c = 0; c < layer.out_units(); ++c) REQUIRE(layer.bias(0, c) == 0.0);
}

}  // namespace

TEST_CASE("init_binomial_full enumerates every combination") {
  const DenseLayer layer = init_binomial_full(3);
  CHECK(layer.out_units() == 7);
  CHECK(layer.in_units() == 3);
  CHECK(layer.initializer_tag == InitializerTag::binomial_full);
  check_binomial_invariants(layer);
  // canonical row 3 is {0,1}
  CHECK(layer.weights(3, 0) == 1.0);
  CHECK(layer.weights(3, 1) == 1.0);
  CHECK(layer.weights(3, 2) == 0.0);
}

TEST_CASE("init_binomial_full single feature") {
  const DenseLayer layer = init_binomial_full(1);
  CHECK(layer.out_units() == 1);
  CHECK(layer.weights(0, 0) == 1.0);
}

TEST_CASE("init_binomial_full covers the 14-feature case") {
  const DenseLayer layer = init_binomial_full(14);
  CHECK(layer.out_units() == 16383);
  CHECK(layer.in_units() == 14);
}

TEST_CASE("init_binomial_full refuses to exceed the neuron cap") {
  // 2^18 - 1 = 262143 > 100000
  CHECK_THROWS_WITH(init_binomial_full(18),
                    Catch::Matchers::ContainsSubstring("init_binomial_prefix") &&
                        Catch::Matchers::ContainsSubstring("init_binomial_random"));
  CHECK_NOTHROW(init_binomial_full(18, 262143));
}

TEST_CASE("init_binomial_full rows follow unrank exhaustively") {
  for (std::size_t f = 1; f <= 10; ++f) {
    const DenseLayer layer = init_binomial_full(f);
    const std::uint64_t total = total_combinations(f);
    REQUIRE(layer.out_units() == total);
    for (std::uint64_t r = 0; r < total; ++r) {
      const FeatureCombination combo = unrank(f, r);
      double row_sum = 0.0;
      for (std::size_t c = 0; c < f; ++c) row_sum += layer.weights(r, c);
      REQUIRE(row_sum == static_cast<double>(combo.indices.size()));
      for (std::size_t idx : combo.indices) REQUIRE(layer.weights(r, idx) == 1.0);
    }
  }
}

TEST_CASE("init_binomial_prefix") {
  SECTION("prefix covering everything equals the full enumeration") {
    const DenseLayer full = init_binomial_full(3);
    const DenseLayer prefix = init_binomial_prefix(3, 7);
    REQUIRE(prefix.out_units() == full.out_units());
    for (std::size_t r = 0; r < 7; ++r) {
      for (std::size_t c = 0; c < 3; ++c) {
        CHECK(prefix.weights(r, c) == full.weights(r, c));
      }
    }
    CHECK(prefix.initializer_tag == InitializerTag::binomial_prefix);
  }
  SECTION("singletons come first, so a square prefix is the identity") {
    const DenseLayer layer = init_binomial_prefix(5, 5);
    for (std::size_t r = 0; r < 5; ++r) {
      for (std::size_t c = 0; c < 5; ++c) {
        CHECK(layer.weights(r, c) == (r == c ? 1.0 : 0.0));
      }
    }
  }
  SECTION("large prefix") {
    const DenseLayer layer = init_binomial_prefix(30, 100000);
    CHECK(layer.out_units() == 100000);
    CHECK(layer.in_units() == 30);
    check_binomial_invariants(layer);
  }
}

TEST_CASE("init_binomial_random") {
  const DenseLayer layer = init_binomial_random(28, 20000, 5);
  CHECK(layer.out_units() == 20000);
  CHECK(layer.in_units() == 28);
  check_binomial_invariants(layer);

  const DenseLayer again = init_binomial_random(28, 20000, 5);
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t c = 0; c < 28; ++c) {
      REQUIRE(layer.weights(r, c) == again.weights(r, c));
    }
  }

  const DenseLayer ones = init_binomial_random(1, 3, 11);
  CHECK(ones.out_units() == 3);
  for (std::size_t r = 0; r < 3; ++r) CHECK(ones.weights(r, 0) == 1.0);
}

TEST_CASE("init_linear_pair wires singletons then pairs") {
  const DenseLayer small = init_linear_pair(2, 3);
  CHECK(small.out_units() == 3);
  CHECK(small.weights(0, 0) == 1.0);
  CHECK(small.weights(0, 1) == 0.0);
  CHECK(small.weights(1, 0) == 0.0);
  CHECK(small.weights(1, 1) == 1.0);
  CHECK(small.weights(2, 0) == 1.0);
  CHECK(small.weights(2, 1) == 1.0);

  const DenseLayer head = init_linear_pair(256, 1024);
  CHECK(head.out_units() == 1024);
  CHECK(head.initializer_tag == InitializerTag::linear_pair);
  check_binomial_invariants(head);
  for (std::size_t r = 0; r < 256; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 256; ++c) sum += head.weights(r, c);
    REQUIRE(sum == 1.0);
    REQUIRE(head.weights(r, r) == 1.0);
  }
  for (std::size_t r = 256; r < 1024; ++r) {
    double sum = 0.0;
    for (std::size_t c = 0; c < 256; ++c) sum += head.weights(r, c);
    REQUIRE(sum == 2.0);
  }
  // first pair row is {0,1}
  CHECK(head.weights(256, 0) == 1.0);
  CHECK(head.weights(256, 1) == 1.0);

  CHECK_THROWS_AS(init_linear_pair(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(init_linear_pair(3, 7), std::invalid_argument);  // C(3,2) = 3 pairs max
  CHECK_NOTHROW(init_linear_pair(3, 6));
}

TEST_CASE("init_xavier stays inside the Glorot bound with zero bias") {
  const DenseLayer layer = init_xavier(100, 100, 3);
  const double bound = std::sqrt(6.0 / 200.0);
  bool any_nonzero = false;
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t c = 0; c < 100; ++c) {
      REQUIRE(std::abs(layer.weights(r, c)) <= bound);
      any_nonzero = any_nonzero || layer.weights(r, c) != 0.0;
    }
  }
  CHECK(any_nonzero);
  for (std::size_t c = 0; c < 100; ++c) CHECK(layer.bias(0, c) == 0.0);

  const DenseLayer same = init_xavier(100, 100, 3);
  const DenseLayer other = init_xavier(100, 100, 4);
  bool differs = false;
  for (std::size_t r = 0; r < 100; ++r) {
    for (std::size_t c = 0; c < 100; ++c) {
      REQUIRE(layer.weights(r, c) == same.weights(r, c));
      differs = differs || layer.weights(r, c) != other.weights(r, c);
    }
  }
  CHECK(differs);
}

TEST_CASE("activations and their slopes") {
  CHECK(apply_activation(Activation::relu, -1.5) == 0.0);
  CHECK(apply_activation(Activation::relu, 2.5) == 2.5);
  CHECK(apply_activation(Activation::sigmoid, 0.0) == Catch::Approx(0.5));
  CHECK(apply_activation(Activation::identity, -3.25) == -3.25);

  const Matrix pre = Matrix::from_rows({{-1.0, 0.0, 2.0}});
  const Matrix post = activate(Activation::relu, pre);
  CHECK(post(0, 0) == 0.0);
  CHECK(post(0, 1) == 0.0);
  CHECK(post(0, 2) == 2.0);

  const Matrix upstream(1, 3, 1.0);
  const Matrix slope = activation_backward(Activation::relu, pre, post, upstream);
  CHECK(slope(0, 0) == 0.0);
  CHECK(slope(0, 1) == 0.0);  // kink resolves to zero slope
  CHECK(slope(0, 2) == 1.0);

  const Matrix spost = activate(Activation::sigmoid, pre);
  const Matrix sslope = activation_backward(Activation::sigmoid, pre, spost, upstream);
  CHECK(sslope(0, 1) == Catch::Approx(0.25));
}
