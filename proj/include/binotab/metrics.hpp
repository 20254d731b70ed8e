#pragma once

// Binary classification metrics. Undefined ratios are NaN, never 0: a
// constant-negative predictor has precision NaN, recall 0, f1 NaN, and
// reports serialize that NaN literally.

#include "binotab/label.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace binotab {

struct ConfusionCounts {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  std::size_t total() const { return tp + fp + tn + fn; }
};

inline ConfusionCounts confusion(const std::vector<BinaryLabel>& predictions,
                                 const std::vector<BinaryLabel>& labels) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("confusion: " + std::to_string(predictions.size()) +
                                " predictions vs " + std::to_string(labels.size()) +
                                " labels");
  }
  if (predictions.empty()) throw std::invalid_argument("confusion: empty input");
  ConfusionCounts c;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool pred_pos = predictions[i].is_positive();
    const bool label_pos = labels[i].is_positive();
    if (pred_pos && label_pos) ++c.tp;
    else if (pred_pos && !label_pos) ++c.fp;
    else if (!pred_pos && label_pos) ++c.fn;
    else ++c.tn;
  }
  return c;
}

struct BinaryMetrics {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

inline BinaryMetrics compute_metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw std::invalid_argument("compute_metrics: empty confusion counts");
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  BinaryMetrics m;
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  m.precision = c.tp + c.fp == 0
                    ? nan
                    : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  m.recall = c.tp + c.fn == 0
                 ? nan
                 : static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  if (std::isnan(m.precision) || std::isnan(m.recall) || m.precision + m.recall == 0.0) {
    m.f1 = nan;
  } else {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

// "NaN" literal for NaN; fixed 3 decimals otherwise (table style).
inline std::string format_metric(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", value);
  return buf;
}

// Full shortest-roundtrip precision for machine output.
inline std::string format_metric_full(double value) {
  if (std::isnan(value)) return "NaN";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace binotab
