#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "lact/image.hpp"

namespace lact {

// Dense (channels, height, width) tensor, row-major within each channel.
class FeatureTensor {
 public:
  FeatureTensor() = default;

  FeatureTensor(int channels, int height, int width, double fill = 0.0)
      : c_(channels), h_(height), w_(width) {
    if (channels < 1 || height < 1 || width < 1)
      throw std::invalid_argument("FeatureTensor: dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(channels) * height * width, fill);
  }

  int channels() const { return c_; }
  int height() const { return h_; }
  int width() const { return w_; }
  std::size_t size() const { return values_.size(); }

  double& at(int c, int i, int j) { return values_[index(c, i, j)]; }
  double at(int c, int i, int j) const { return values_[index(c, i, j)]; }

  double* channel(int c) {
    return values_.data() + static_cast<std::size_t>(c) * h_ * w_;
  }
  const double* channel(int c) const {
    return values_.data() + static_cast<std::size_t>(c) * h_ * w_;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool same_shape(const FeatureTensor& other) const {
    return c_ == other.c_ && h_ == other.h_ && w_ == other.w_;
  }

  static FeatureTensor from_image(const Image& img) {
    FeatureTensor t(1, img.side(), img.side());
    t.values_ = img.values();
    return t;
  }

  Image to_image() const {
    if (c_ != 1 || h_ != w_)
      throw std::logic_error("FeatureTensor::to_image: need 1 x n x n");
    Image img(h_);
    img.values() = values_;
    return img;
  }

 private:
  std::size_t index(int c, int i, int j) const {
    return (static_cast<std::size_t>(c) * h_ + i) * w_ + j;
  }

  int c_ = 0, h_ = 0, w_ = 0;
  std::vector<double> values_;
};

// Row-major matrix used for token blocks in the attention path.
class Matrix {
 public:
  Matrix() = default;

  Matrix(int rows, int cols, double fill = 0.0) : r_(rows), c_(cols) {
    if (rows < 1 || cols < 1)
      throw std::invalid_argument("Matrix: dimensions must be >= 1");
    values_.assign(static_cast<std::size_t>(rows) * cols, fill);
  }

  int rows() const { return r_; }
  int cols() const { return c_; }

  double& at(int r, int c) { return values_[static_cast<std::size_t>(r) * c_ + c]; }
  double at(int r, int c) const { return values_[static_cast<std::size_t>(r) * c_ + c]; }

  double* row(int r) { return values_.data() + static_cast<std::size_t>(r) * c_; }
  const double* row(int r) const {
    return values_.data() + static_cast<std::size_t>(r) * c_;
  }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  int r_ = 0, c_ = 0;
  std::vector<double> values_;
};

inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows())
    throw std::invalid_argument("matmul: inner dimensions differ");
  Matrix out(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a.at(i, k);
      const double* brow = b.row(k);
      double* orow = out.row(i);
      for (int j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

inline Matrix transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out.at(j, i) = a.at(i, j);
  return out;
}

}  // namespace lact
