#pragma once

#include <stdexcept>

namespace binotab {

// Binary class label, +1 or -1.
struct BinaryLabel {
  int value = -1;

  BinaryLabel() = default;
  explicit BinaryLabel(int v) : value(v) {
    if (v != 1 && v != -1) throw std::invalid_argument("BinaryLabel: value must be +1 or -1");
  }

  static BinaryLabel positive() { return BinaryLabel(1); }
  static BinaryLabel negative() { return BinaryLabel(-1); }

  bool is_positive() const { return value > 0; }
  bool operator==(const BinaryLabel&) const = default;
};

// Score threshold at zero; ties go negative.
inline BinaryLabel predicted_label(double score) {
  return score > 0.0 ? BinaryLabel::positive() : BinaryLabel::negative();
}

}  // namespace binotab
