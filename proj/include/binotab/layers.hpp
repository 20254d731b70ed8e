#pragma once

// Dense layers and the initializers: Xavier uniform, binomial (full
// enumeration, canonical-order prefix, random subsets) and the linear pair
// scheme for ensemble heads. Binomial-family layers start with weights in
// {0,1} -- each output neuron sums exactly one subset of its inputs -- and
// zero bias; the weights are ordinary trainable parameters afterwards.

#include "binotab/combinatorics.hpp"
#include "binotab/matrix.hpp"
#include "binotab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

enum class Activation : std::uint8_t { relu = 0, sigmoid = 1, identity = 2 };

inline const char* to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::identity: return "identity";
  }
  return "?";
}

enum class InitializerTag : std::uint8_t {
  xavier,
  binomial_full,
  binomial_random,
  binomial_prefix,
  linear_pair,
};

struct DenseLayer {
  Matrix weights;  // (out_units, in_units)
  Matrix bias;     // 1 x out_units
  InitializerTag initializer_tag = InitializerTag::xavier;

  std::size_t in_units() const { return weights.cols(); }
  std::size_t out_units() const { return weights.rows(); }
};

// Default cap on materialized neurons; full enumeration above it is refused.
inline constexpr std::size_t kDefaultMaxNeurons = 100000;

namespace detail {

inline DenseLayer layer_from_combinations(const std::vector<FeatureCombination>& combos,
                                          std::size_t in_features, InitializerTag tag) {
  DenseLayer layer;
  layer.weights = Matrix(combos.size(), in_features, 0.0);
  layer.bias = Matrix(1, combos.size(), 0.0);
  layer.initializer_tag = tag;
  for (std::size_t row = 0; row < combos.size(); ++row) {
    for (std::size_t idx : combos[row].indices) layer.weights(row, idx) = 1.0;
  }
  return layer;
}

}  // namespace detail

// One neuron per non-empty feature subset, in canonical order.
inline DenseLayer init_binomial_full(std::size_t in_features,
                                     std::size_t max_neurons = kDefaultMaxNeurons) {
  const std::uint64_t total = total_combinations(in_features);
  if (total > max_neurons) {
    throw std::invalid_argument(
        "init_binomial_full: " + std::to_string(total) + " combinations of " +
        std::to_string(in_features) + " features exceed the cap of " +
        std::to_string(max_neurons) +
        "; use init_binomial_prefix or init_binomial_random instead");
  }
  return detail::layer_from_combinations(
      enumerate_prefix(in_features, static_cast<std::size_t>(total)), in_features,
      InitializerTag::binomial_full);
}

// First `neurons` combinations in canonical order (all of them if fewer exist).
inline DenseLayer init_binomial_prefix(std::size_t in_features, std::size_t neurons) {
  if (neurons == 0) throw std::invalid_argument("init_binomial_prefix: neurons must be >= 1");
  return detail::layer_from_combinations(enumerate_prefix(in_features, neurons),
                                         in_features, InitializerTag::binomial_prefix);
}

// `neurons` uniformly sampled combinations; duplicates allowed.
inline DenseLayer init_binomial_random(std::size_t in_features, std::size_t neurons,
                                       std::uint64_t seed) {
  if (neurons == 0) throw std::invalid_argument("init_binomial_random: neurons must be >= 1");
  return detail::layer_from_combinations(sample_random(in_features, neurons, seed),
                                         in_features, InitializerTag::binomial_random);
}

// Ensemble head wiring: each input feeds its own output neuron first, the
// remaining outputs take pairs of inputs {0,1},{0,2},... in lex order.
inline DenseLayer init_linear_pair(std::size_t in_units, std::size_t out_units) {
  if (out_units < in_units) {
    throw std::invalid_argument("init_linear_pair: out_units must be >= in_units");
  }
  const std::uint64_t pair_budget =
      static_cast<std::uint64_t>(in_units) * (in_units - 1) / 2;
  if (out_units - in_units > pair_budget) {
    throw std::invalid_argument("init_linear_pair: " + std::to_string(out_units - in_units) +
                                " pair neurons requested but only " +
                                std::to_string(pair_budget) + " pairs exist");
  }
  std::vector<FeatureCombination> combos;
  combos.reserve(out_units);
  for (std::size_t i = 0; i < in_units; ++i) combos.push_back(FeatureCombination{{i}});
  std::size_t remaining = out_units - in_units;
  for (std::size_t a = 0; a + 1 < in_units && remaining > 0; ++a) {
    for (std::size_t b = a + 1; b < in_units && remaining > 0; ++b) {
      combos.push_back(FeatureCombination{{a, b}});
      --remaining;
    }
  }
  return detail::layer_from_combinations(combos, in_units, InitializerTag::linear_pair);
}

// Glorot uniform: weights in [-sqrt(6/(in+out)), +sqrt(6/(in+out))], zero bias.
inline DenseLayer init_xavier(std::size_t in_units, std::size_t out_units,
                              std::uint64_t seed) {
  if (in_units == 0 || out_units == 0) {
    throw std::invalid_argument("init_xavier: units must be >= 1");
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(in_units + out_units));
  DenseLayer layer;
  layer.weights = Matrix(out_units, in_units);
  layer.bias = Matrix(1, out_units, 0.0);
  layer.initializer_tag = InitializerTag::xavier;
  Rng rng(seed);
  double* w = layer.weights.data();
  for (std::size_t i = 0; i < out_units * in_units; ++i) {
    w[i] = uniform_in(rng, -limit, limit);  // row-major fill order
  }
  return layer;
}

inline double apply_activation(Activation a, double z) {
  switch (a) {
    case Activation::relu: return z > 0.0 ? z : 0.0;
    case Activation::sigmoid: return 1.0 / (1.0 + std::exp(-z));
    case Activation::identity: return z;
  }
  return z;
}

inline Matrix activate(Activation a, const Matrix& pre) {
  switch (a) {
    case Activation::relu:
      return Matrix::wrap(pre.eigen().cwiseMax(0.0));
    case Activation::sigmoid:
      return Matrix::wrap(
          (1.0 / (1.0 + (-pre.eigen().array()).exp())).matrix());
    case Activation::identity:
      return pre;
  }
  return pre;
}

// upstream (.) d act/d z, computed from the cached pre/post activations.
inline Matrix activation_backward(Activation a, const Matrix& pre, const Matrix& post,
                                  const Matrix& upstream) {
  switch (a) {
    case Activation::relu:
      return Matrix::wrap(
          (upstream.eigen().array() * (pre.eigen().array() > 0.0).cast<double>()).matrix());
    case Activation::sigmoid:
      return Matrix::wrap(
          (upstream.eigen().array() * post.eigen().array() * (1.0 - post.eigen().array()))
              .matrix());
    case Activation::identity:
      return upstream;
  }
  return upstream;
}

}  // namespace binotab
