#pragma once

// Gradient-form binary losses and the jointly trained ensemble machinery.
//
// hinge_gradient and binary_log_gradient return d loss / d out directly
// (the training loop never needs loss values, only gradients); the matching
// primitive losses max(0, 1 - GT*out) and softplus(-GT*out) are exposed for
// monitoring. The ensemble spreads one task over M output neurons:
//
//   bagging   every neuron gets its own copy of the loss on its own output.
//   boosting  neuron m is gated by the normalized partial ensemble of
//             neurons 0..m, so later members only learn where the running
//             ensemble still errs; the gradient lands on neuron m's output.
//
// Per-neuron batch masking drops entries from a neuron's gradient; the scale
// factor sc_m = B / kept_m compensates so the expected gradient magnitude is
// mask-invariant. All gradients are returned mean-reduced over the batch.

#include "binotab/label.hpp"
#include "binotab/matrix.hpp"
#include "binotab/rng.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

enum class LossKind { hinge, binary_log };
enum class Aggregation { single, bagging, boosting };

inline const char* to_string(LossKind k) {
  return k == LossKind::hinge ? "hinge" : "binary_log";
}

inline const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::single: return "single";
    case Aggregation::bagging: return "bagging";
    case Aggregation::boosting: return "boosting";
  }
  return "?";
}

struct EnsembleLossConfig {
  LossKind loss_kind = LossKind::hinge;
  Aggregation aggregation = Aggregation::boosting;
  double mask_rate = 0.0;  // fraction of batch entries ignored per output neuron, in [0,1)
  std::uint64_t seed = 0;
};

inline void validate(const EnsembleLossConfig& cfg) {
  if (cfg.mask_rate < 0.0 || cfg.mask_rate >= 1.0) {
    throw std::invalid_argument("EnsembleLossConfig: mask_rate must be in [0,1)");
  }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Numerically stable log(1 + e^x).
inline double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

// d/d_out of sc * max(0, 1 - GT*out).
inline double hinge_gradient(double out, BinaryLabel label, double sc) {
  const double gt = static_cast<double>(label.value);
  return 1.0 - gt * out > 0.0 ? -sc * gt : 0.0;
}

inline double hinge_loss(double out, BinaryLabel label) {
  const double margin = 1.0 - static_cast<double>(label.value) * out;
  return margin > 0.0 ? margin : 0.0;
}

// d/d_out of sc * softplus(-GT*out), binary cross-entropy on +/-1 labels.
inline double binary_log_gradient(double out, BinaryLabel label, double sc) {
  const double gt = static_cast<double>(label.value);
  if (gt > 0.0) return gt * sc * (sigmoid(out) - 1.0);
  return -gt * sc * sigmoid(out);
}

inline double binary_log_loss(double out, BinaryLabel label) {
  return softplus(-static_cast<double>(label.value) * out);
}

inline double loss_gradient(LossKind kind, double out, BinaryLabel label, double sc) {
  return kind == LossKind::hinge ? hinge_gradient(out, label, sc)
                                 : binary_log_gradient(out, label, sc);
}

inline double loss_value(LossKind kind, double out, BinaryLabel label) {
  return kind == LossKind::hinge ? hinge_loss(out, label) : binary_log_loss(out, label);
}

// Per-(sample, neuron) keep mask. Every neuron column keeps at least one
// entry; an all-dropped column is redrawn.
struct BatchMask {
  std::size_t batch = 0;
  std::size_t outputs = 0;
  std::vector<std::uint8_t> keep;  // batch x outputs, row-major

  bool kept(std::size_t b, std::size_t m) const { return keep[b * outputs + m] != 0; }

  static BatchMask all_kept(std::size_t batch, std::size_t outputs) {
    return BatchMask{batch, outputs, std::vector<std::uint8_t>(batch * outputs, 1)};
  }
};

inline BatchMask make_mask(std::size_t batch, std::size_t outputs, double mask_rate,
                           std::uint64_t seed) {
  if (mask_rate < 0.0 || mask_rate >= 1.0) {
    throw std::invalid_argument("make_mask: mask_rate must be in [0,1)");
  }
  BatchMask mask{batch, outputs, std::vector<std::uint8_t>(batch * outputs, 0)};
  Rng rng(seed);
  const double keep_prob = 1.0 - mask_rate;
  for (std::size_t m = 0; m < outputs; ++m) {
    for (;;) {
      std::size_t kept = 0;
      for (std::size_t b = 0; b < batch; ++b) {
        const bool keep = uniform_real(rng) < keep_prob;
        mask.keep[b * outputs + m] = keep ? 1 : 0;
        if (keep) ++kept;
      }
      if (kept > 0) break;  // redraw all-dropped column
    }
  }
  return mask;
}

struct EnsembleGradient {
  Matrix gradient;      // B x M, mean-reduced over the batch
  double monitor_loss;  // primitive loss of the aggregated score, over kept entries
};

// Inference-time combination of one sample's M outputs.
inline double aggregate_score(const Matrix& outputs, const EnsembleLossConfig& cfg) {
  if (outputs.rows() != 1) {
    throw std::invalid_argument("aggregate_score: expected a 1xM row, got " +
                                outputs.shape_string());
  }
  if (cfg.aggregation == Aggregation::single) return outputs(0, 0);
  double sum = 0.0;
  for (std::size_t m = 0; m < outputs.cols(); ++m) sum += outputs(0, m);
  return sum / static_cast<double>(outputs.cols());
}

inline EnsembleGradient ensemble_gradient(const Matrix& outputs,
                                          const std::vector<BinaryLabel>& labels,
                                          const EnsembleLossConfig& cfg,
                                          const BatchMask& mask) {
  validate(cfg);
  const std::size_t B = outputs.rows();
  const std::size_t M = outputs.cols();
  if (labels.size() != B) {
    throw std::invalid_argument("ensemble_gradient: " + std::to_string(labels.size()) +
                                " labels for a batch of " + std::to_string(B));
  }
  if (mask.batch != B || mask.outputs != M) {
    throw std::invalid_argument("ensemble_gradient: mask shape mismatch");
  }
  if (cfg.aggregation == Aggregation::single && M != 1) {
    throw std::invalid_argument("ensemble_gradient: single aggregation requires exactly "
                                "1 output unit, got " + std::to_string(M));
  }

  EnsembleGradient result;
  result.gradient = Matrix(B, M, 0.0);
  const double batch_size = static_cast<double>(B);

  if (cfg.aggregation == Aggregation::single) {
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < B; ++b) {
      const double out = outputs(b, 0);
      result.gradient(b, 0) = loss_gradient(cfg.loss_kind, out, labels[b], 1.0) / batch_size;
      loss_sum += loss_value(cfg.loss_kind, out, labels[b]);
    }
    result.monitor_loss = loss_sum / batch_size;
    return result;
  }

  // Per-neuron kept counts and scale factors.
  std::vector<std::size_t> kept_count(M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    for (std::size_t b = 0; b < B; ++b) {
      if (mask.kept(b, m)) ++kept_count[m];
    }
  }

  double loss_sum = 0.0;
  std::size_t loss_entries = 0;
  for (std::size_t b = 0; b < B; ++b) {
    const BinaryLabel label = labels[b];
    double running = 0.0;
    double row_sum = 0.0;
    for (std::size_t m = 0; m < M; ++m) row_sum += outputs(b, m);
    const double aggregated = row_sum / static_cast<double>(M);
    for (std::size_t m = 0; m < M; ++m) {
      running += outputs(b, m);
      if (kept_count[m] == 0) continue;  // hand-made mask; never from make_mask
      if (!mask.kept(b, m)) continue;
      const double sc = batch_size / static_cast<double>(kept_count[m]);
      const double margin_input = cfg.aggregation == Aggregation::boosting
                                      ? running / static_cast<double>(m + 1)
                                      : outputs(b, m);
      result.gradient(b, m) =
          loss_gradient(cfg.loss_kind, margin_input, label, sc) / batch_size;
      loss_sum += loss_value(cfg.loss_kind, aggregated, label);
      ++loss_entries;
    }
  }
  result.monitor_loss = loss_entries > 0 ? loss_sum / static_cast<double>(loss_entries) : 0.0;
  return result;
}

}  // namespace binotab
