#pragma once

#include <utility>
#include <vector>

#include "lact/image.hpp"
#include "lact/rng.hpp"
#include "lact/tensor.hpp"

namespace lact {

// 3x3 Sobel kernels in correlation orientation. kSobelX responds to values
// increasing with the column index, kSobelY to values increasing with the row
// index.
extern const double kSobelX[9];
extern const double kSobelY[9];

// 2D correlation with replicate (clamp to edge) padding; output keeps the
// input size. Kernel sides must be odd.
void conv2d_same_replicate(const double* in, int h, int w, const double* k,
                           int kh, int kw, double* out);

// Exact adjoint of conv2d_same_replicate, used for analytic loss gradients.
void conv2d_same_replicate_adjoint(const double* in, int h, int w,
                                   const double* k, int kh, int kw,
                                   double* out);

// Square odd-sized kernel with its own storage.
struct Conv2DKernel {
  int size = 0;
  std::vector<double> w;

  Conv2DKernel() = default;
  explicit Conv2DKernel(int size, double fill = 0.0);

  static Conv2DKernel delta(int size);
  static Conv2DKernel seeded(SplitMix64& rng, int size);

  double& at(int r, int c) { return w[static_cast<std::size_t>(r) * size + c]; }
  double at(int r, int c) const {
    return w[static_cast<std::size_t>(r) * size + c];
  }
};

// Applies one 2D kernel to every channel independently.
FeatureTensor depthwise_conv(const FeatureTensor& x, const Conv2DKernel& k);

// Dense convolution layer (out_c, in_c, k, k) with replicate padding.
// stride 2 keeps every second output row/column of the stride-1 result.
class ConvLayer {
 public:
  ConvLayer() = default;
  ConvLayer(int in_c, int out_c, int k);

  // Weights drawn uniformly from [-1/sqrt(fan_in), 1/sqrt(fan_in)] in fixed
  // (out, in, row, col) order.
  static ConvLayer seeded(SplitMix64& rng, int in_c, int out_c, int k);

  FeatureTensor apply(const FeatureTensor& x, int stride = 1) const;

  int in_channels() const { return in_c_; }
  int out_channels() const { return out_c_; }
  int kernel() const { return k_; }

  std::vector<double>& weights() { return w_; }
  const std::vector<double>& weights() const { return w_; }
  double& weight(int oc, int ic, int r, int c) {
    return w_[((static_cast<std::size_t>(oc) * in_c_ + ic) * k_ + r) * k_ + c];
  }

 private:
  int in_c_ = 0, out_c_ = 0, k_ = 0;
  std::vector<double> w_;
};

std::pair<Image, Image> sobel_gradients(const Image& img);
Image sobel_magnitude(const Image& img);

FeatureTensor upsample_nearest2(const FeatureTensor& x);
FeatureTensor concat_channels(const FeatureTensor& a, const FeatureTensor& b);

}  // namespace lact
