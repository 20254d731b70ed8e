#pragma once

// Feedforward network of (DenseLayer, Activation) pairs with hand-derived
// forward/backward. Parameter gradients are sums over the batch of the
// supplied per-sample output gradients; any mean reduction is the caller's
// job (the ensemble losses already fold in 1/B).

#include "binotab/layers.hpp"
#include "binotab/matrix.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace binotab {

class Network {
 public:
  void add(DenseLayer layer, Activation activation) {
    if (!layers_.empty() && layers_.back().out_units() != layer.in_units()) {
      throw std::invalid_argument(
          "Network::add: layer " + std::to_string(layers_.size()) + " expects " +
          std::to_string(layers_.back().out_units()) + " inputs, got layer with " +
          std::to_string(layer.in_units()));
    }
    layers_.push_back(std::move(layer));
    activations_.push_back(activation);
  }

  std::size_t layer_count() const { return layers_.size(); }
  DenseLayer& layer(std::size_t i) { return layers_.at(i); }
  const DenseLayer& layer(std::size_t i) const { return layers_.at(i); }
  Activation activation(std::size_t i) const { return activations_.at(i); }

  std::size_t input_units() const { return layers_.front().in_units(); }
  std::size_t output_units() const { return layers_.back().out_units(); }

 private:
  std::vector<DenseLayer> layers_;
  std::vector<Activation> activations_;
};

struct ForwardCache {
  Matrix input;
  std::vector<Matrix> pre;   // z_i = h_{i-1} W_i^T + b_i
  std::vector<Matrix> post;  // h_i = act(z_i)
};

// Returns the B x output_units activations of the last layer plus the cache
// needed for backward.
inline std::pair<Matrix, ForwardCache> forward(const Network& net, const Matrix& x) {
  if (net.layer_count() == 0) throw std::invalid_argument("forward: empty network");
  if (x.cols() != net.input_units()) {
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " features, network expects " +
                                std::to_string(net.input_units()));
  }
  ForwardCache cache;
  cache.input = x;
  cache.pre.reserve(net.layer_count());
  cache.post.reserve(net.layer_count());
  const Matrix* h = &x;
  for (std::size_t i = 0; i < net.layer_count(); ++i) {
    const DenseLayer& layer = net.layer(i);
    Matrix z = Matrix::wrap(h->eigen() * layer.weights.eigen().transpose());
    z = add_rowwise(z, layer.bias);
    cache.pre.push_back(std::move(z));
    cache.post.push_back(activate(net.activation(i), cache.pre.back()));
    h = &cache.post.back();
  }
  return {cache.post.back(), cache};
}

struct LayerGradients {
  Matrix weights;
  Matrix bias;
};

struct BackwardResult {
  std::vector<LayerGradients> layers;
  Matrix input_gradient;  // B x in_units of the first layer
};

inline BackwardResult backward(const Network& net, const ForwardCache& cache,
                               const Matrix& output_gradient) {
  const std::size_t count = net.layer_count();
  if (cache.pre.size() != count) throw std::invalid_argument("backward: cache/network mismatch");
  if (output_gradient.rows() != cache.post.back().rows() ||
      output_gradient.cols() != cache.post.back().cols()) {
    throw std::invalid_argument("backward: output gradient is " +
                                output_gradient.shape_string() + ", forward output was " +
                                cache.post.back().shape_string());
  }
  BackwardResult result;
  result.layers.resize(count);
  Matrix upstream = output_gradient;
  for (std::size_t i = count; i-- > 0;) {
    const DenseLayer& layer = net.layer(i);
    const Matrix dz =
        activation_backward(net.activation(i), cache.pre[i], cache.post[i], upstream);
    const Matrix& h_prev = i == 0 ? cache.input : cache.post[i - 1];
    result.layers[i].weights = Matrix::wrap(dz.eigen().transpose() * h_prev.eigen());
    result.layers[i].bias = column_sums(dz);
    upstream = Matrix::wrap(dz.eigen() * layer.weights.eigen());
  }
  result.input_gradient = std::move(upstream);
  return result;
}

}  // namespace binotab
