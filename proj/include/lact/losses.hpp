#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lact/conv.hpp"
#include "lact/image.hpp"
#include "lact/visibility.hpp"

namespace lact {

// Relative weights of the four training loss terms. `mu` is carried along in
// configs for completeness but weights no term.
struct LossWeights {
  double perceptual = 0.5;   // lambda_p
  double ssim = 1.0;         // alpha_s
  double edge = 0.1;         // beta_e
  double anisotropic = 0.3;  // gamma_a
  double mu = 0.3;
};

// Fixed-weight convolutional feature pyramid: one 1->C stage followed by
// four C->C stages, all 5x5 with replicate padding, so every stage keeps the
// input resolution. Weights come from a seed by default; externally trained
// weights can be loaded from file instead.
class FeatureExtractor {
 public:
  static FeatureExtractor seeded(std::uint64_t seed, int channels = 96,
                                 int kernel = 5);
  static FeatureExtractor from_layers(std::vector<ConvLayer> layers);
  static FeatureExtractor load(const std::string& path);
  void save(const std::string& path) const;

  int stages() const { return static_cast<int>(layers_.size()); }
  const std::vector<ConvLayer>& layers() const { return layers_; }

  // Output of every stage, in order.
  std::vector<FeatureTensor> features(const Image& img) const;

 private:
  std::vector<ConvLayer> layers_;
};

// Sum over stages of (1/(w_i h_i)) * ||F_i(pred) - F_i(truth)||^2, where
// (w_i, h_i) is the spatial size of stage i.
double perceptual_loss(const Image& pred, const Image& truth,
                       const FeatureExtractor& fx);

struct LossGrad {
  double value;
  Image grad;
};

// ||W (pred - truth)||^2 with elementwise weights; gradient w.r.t. pred is
// 2 W^2 (pred - truth).
LossGrad anisotropic_loss(const Image& pred, const Image& truth,
                          const WeightMap& w);

// ||Sobel(pred) - Sobel(truth)||^2 over both gradient components; gradient
// via the transposed convolutions.
LossGrad edge_gradient_loss(const Image& pred, const Image& truth);

// Mean structural similarity over sliding uniform windows (stride 1, valid
// region), C1 = (0.01 L)^2, C2 = (0.03 L)^2.
double ssim(const Image& x, const Image& y, int window = 8,
            double data_range = 1.0);
double ssim_loss(const Image& x, const Image& y, int window = 8,
                 double data_range = 1.0);

double total_loss(const Image& pred, const Image& truth, const WeightMap& w,
                  const FeatureExtractor& fx, const LossWeights& weights);

// The weighted combination alone, usable with externally computed components.
double combine_losses(const LossWeights& weights, double l_p, double l_s,
                      double l_e, double l_a);

struct PsnrResult {
  double db;    // +inf when capped
  bool capped;  // true iff the images are identical (MSE = 0)
};

PsnrResult psnr(const Image& x, const Image& y, double data_range = 1.0);

}  // namespace lact
