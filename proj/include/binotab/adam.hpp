#pragma once

// ADAM with L2-coupled weight decay: the decay term is added to the gradient
// before the moment accumulators, matching the classic ADAM+wd formulation.

#include "binotab/matrix.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

struct AdamConfig {
  double learning_rate = 0.01;
  double weight_decay = 0.0005;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

inline void validate(const AdamConfig& cfg) {
  if (cfg.learning_rate <= 0.0) throw std::invalid_argument("AdamConfig: learning_rate must be > 0");
  if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) {
    throw std::invalid_argument("AdamConfig: betas must be in [0,1)");
  }
  if (cfg.epsilon <= 0.0) throw std::invalid_argument("AdamConfig: epsilon must be > 0");
  if (cfg.weight_decay < 0.0) throw std::invalid_argument("AdamConfig: weight_decay must be >= 0");
}

// First/second moment accumulators, one pair per parameter matrix.
struct AdamState {
  std::vector<Matrix> m;
  std::vector<Matrix> v;
  std::vector<std::string> names;  // for diagnostics
  std::uint64_t t = 0;

  static AdamState for_params(const std::vector<const Matrix*>& params,
                              std::vector<std::string> names) {
    if (names.size() != params.size()) {
      throw std::invalid_argument("AdamState: one name per parameter required");
    }
    AdamState state;
    state.names = std::move(names);
    state.m.reserve(params.size());
    state.v.reserve(params.size());
    for (const Matrix* p : params) {
      state.m.emplace_back(p->rows(), p->cols(), 0.0);
      state.v.emplace_back(p->rows(), p->cols(), 0.0);
    }
    return state;
  }
};

inline void adam_step(const std::vector<Matrix*>& params, const std::vector<Matrix>& grads,
                      AdamState& state, const AdamConfig& cfg) {
  validate(cfg);
  if (params.size() != grads.size() || params.size() != state.m.size()) {
    throw std::invalid_argument("adam_step: parameter/gradient/state counts differ");
  }
  state.t += 1;
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    Matrix& p = *params[i];
    const Matrix& g = grads[i];
    if (!p.same_shape(g) || !p.same_shape(state.m[i])) {
      throw std::invalid_argument("adam_step: shape mismatch for " + state.names[i] +
                                  ": param " + p.shape_string() + ", grad " +
                                  g.shape_string());
    }
    if (!g.eigen().allFinite()) {
      throw std::runtime_error("adam_step: non-finite gradient for " + state.names[i]);
    }
    auto pa = p.eigen().array();
    auto ma = state.m[i].eigen().array();
    auto va = state.v[i].eigen().array();
    const Matrix::Storage decayed =
        (g.eigen().array() + cfg.weight_decay * pa).matrix();
    ma = cfg.beta1 * ma + (1.0 - cfg.beta1) * decayed.array();
    va = cfg.beta2 * va + (1.0 - cfg.beta2) * decayed.array().square();
    pa -= cfg.learning_rate * (ma / bc1) / ((va / bc2).sqrt() + cfg.epsilon);
  }
}

}  // namespace binotab
