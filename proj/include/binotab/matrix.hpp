#pragma once

// Dense row-major double matrix, the single numeric container for
// activations, weights and gradients. Rows index batch samples everywhere
// downstream. Arithmetic is delegated to Eigen; shapes are always checked
// explicitly and there is no broadcasting beyond add_rowwise.

#include <Eigen/Dense>

#include <cstddef>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace binotab {

class Matrix {
 public:
  using Storage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  // Empty placeholder (0x0); every sized matrix has rows >= 1 and cols >= 1.
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("Matrix: dimensions must be >= 1, got " +
                                  shape_string(rows, cols));
    }
    m_ = Storage::Constant(static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(cols), fill);
  }

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    Matrix out(r, c);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != c) throw std::invalid_argument("Matrix::from_rows: ragged rows");
      std::size_t j = 0;
      for (double v : row) out(i, j++) = v;
      ++i;
    }
    return out;
  }

  std::size_t rows() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(m_.cols()); }
  std::size_t size() const { return rows() * cols(); }
  bool empty() const { return m_.size() == 0; }

  double& operator()(std::size_t r, std::size_t c) {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  double operator()(std::size_t r, std::size_t c) const {
    return m_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  // Row-major contiguous storage.
  double* data() { return m_.data(); }
  const double* data() const { return m_.data(); }

  Storage& eigen() { return m_; }
  const Storage& eigen() const { return m_; }

  static Matrix wrap(Storage m) {
    Matrix out;
    out.m_ = std::move(m);
    return out;
  }

  bool same_shape(const Matrix& other) const {
    return rows() == other.rows() && cols() == other.cols();
  }

  std::string shape_string() const { return shape_string(rows(), cols()); }

  static std::string shape_string(std::size_t r, std::size_t c) {
    std::ostringstream os;
    os << "(" << r << "x" << c << ")";
    return os.str();
  }

 private:
  Storage m_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("matmul: inner dimensions differ, " +
                                a.shape_string() + " * " + b.shape_string());
  }
  return Matrix::wrap(a.eigen() * b.eigen());
}

// bias is 1 x a.cols, added to every row of a.
inline Matrix add_rowwise(const Matrix& a, const Matrix& bias) {
  if (bias.rows() != 1 || bias.cols() != a.cols()) {
    throw std::invalid_argument("add_rowwise: bias must be 1x" + std::to_string(a.cols()) +
                                ", got " + bias.shape_string());
  }
  return Matrix::wrap(a.eigen().rowwise() + bias.eigen().row(0));
}

template <typename F>
Matrix map(const Matrix& a, F f) {
  return Matrix::wrap(a.eigen().unaryExpr([&](double v) { return f(v); }));
}

inline Matrix transpose(const Matrix& a) {
  return Matrix::wrap(a.eigen().transpose());
}

inline Matrix scale(const Matrix& a, double s) {
  return Matrix::wrap(a.eigen() * s);
}

inline Matrix hadamard(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("hadamard: shapes differ, " + a.shape_string() +
                                " vs " + b.shape_string());
  }
  return Matrix::wrap(a.eigen().cwiseProduct(b.eigen()));
}

inline Matrix add(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument("add: shapes differ, " + a.shape_string() + " vs " +
                                b.shape_string());
  }
  return Matrix::wrap(a.eigen() + b.eigen());
}

// 1 x cols vector of column sums.
inline Matrix column_sums(const Matrix& a) {
  return Matrix::wrap(a.eigen().colwise().sum());
}

}  // namespace binotab
