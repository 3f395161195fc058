#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lact {

// Square grid of attenuation values covering the physical extent [-1,1]^2.
// Pixel (row, col) is centered at x = -1 + (col+0.5)*h, y = -1 + (row+0.5)*h
// with h = 2/n; the row index increases with y.
class Image {
 public:
  Image() = default;

  explicit Image(int side, double fill = 0.0) : side_(side) {
    if (side < 2) throw std::invalid_argument("Image: side must be >= 2");
    values_.assign(static_cast<std::size_t>(side) * side, fill);
  }

  int side() const { return side_; }
  double pixel_width() const { return 2.0 / side_; }

  double& at(int row, int col) { return values_[index(row, col)]; }
  double at(int row, int col) const { return values_[index(row, col)]; }

  double x_of(int col) const { return -1.0 + (col + 0.5) * pixel_width(); }
  double y_of(int row) const { return -1.0 + (row + 0.5) * pixel_width(); }

  double* row(int r) { return values_.data() + index(r, 0); }
  const double* row(int r) const { return values_.data() + index(r, 0); }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  // Bilinear sample at a world point. Outside the grid of pixel centers the
  // image fades to zero over one pixel, which keeps the operator linear.
  double sample(double x, double y) const {
    const double h = pixel_width();
    const double u = (x + 1.0) / h - 0.5;
    const double v = (y + 1.0) / h - 0.5;
    if (u <= -1.0 || v <= -1.0 || u >= side_ || v >= side_) return 0.0;
    const int j0 = static_cast<int>(std::floor(u));
    const int i0 = static_cast<int>(std::floor(v));
    const double fu = u - j0;
    const double fv = v - i0;
    auto tap = [&](int i, int j) -> double {
      if (i < 0 || i >= side_ || j < 0 || j >= side_) return 0.0;
      return values_[index(i, j)];
    };
    return (1.0 - fv) * ((1.0 - fu) * tap(i0, j0) + fu * tap(i0, j0 + 1)) +
           fv * ((1.0 - fu) * tap(i0 + 1, j0) + fu * tap(i0 + 1, j0 + 1));
  }

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * side_ + col;
  }

  int side_ = 0;
  std::vector<double> values_;
};

}  // namespace lact
