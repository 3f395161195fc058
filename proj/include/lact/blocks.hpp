#pragma once

#include <array>
#include <cstdint>

#include "lact/conv.hpp"
#include "lact/image.hpp"
#include "lact/rng.hpp"
#include "lact/tensor.hpp"

namespace lact {

// F_e = x + x*Gx + x*Gy, Sobel applied per channel with replicate padding.
FeatureTensor sobel_edge_fuse(const FeatureTensor& x);

struct Subbands {
  FeatureTensor ll, lh, hl, hh;
};

// Single-level orthonormal Haar decomposition per channel; each subband has
// half the spatial size. Requires even H and W.
Subbands dwt2(const FeatureTensor& x);

// Exact inverse of dwt2.
FeatureTensor idwt2(const Subbands& sb);
FeatureTensor idwt2(const FeatureTensor& ll, const FeatureTensor& lh,
                    const FeatureTensor& hl, const FeatureTensor& hh);

// One spatial kernel for the direct branch plus one per wavelet subband.
struct KernelSet {
  Conv2DKernel k0, k1, k2, k3, k4;

  // All five kernels set to the identity delta.
  static KernelSet delta(int size = 3);
  static KernelSet seeded(SplitMix64& rng, int size = 3);
};

// F_o = Conv(x,K0) + IWT(Conv(LL,K1), Conv(LH,K2), Conv(HL,K3), Conv(HH,K4))
// with (LL,LH,HL,HH) = WT(x). All convolutions are depthwise and keep the
// spatial size.
FeatureTensor wtconv(const FeatureTensor& x, const KernelSet& kernels);

struct BlockConfig {
  int channels = 8;              // encoder base width c
  int patch = 8;                 // token patch size p
  std::uint64_t seed = 0x1234;   // parameter initialization seed
};

// Edge fusion followed by a 3-stage encoder (WTConv + stride-2 convolution,
// widths c, 2c, 4c, 8c) and a 3-stage decoder with nearest-neighbor
// upsampling and skip concatenation. Returns d1 of shape (c, H, W).
// Requires H, W divisible by 8. All parameters come from cfg.seed.
FeatureTensor vswd_forward(const Image& image, const BlockConfig& cfg);

// Channels viewed as (g, C/g), transposed and flattened back; values are
// only permuted. Requires g | C.
FeatureTensor channel_shuffle(const FeatureTensor& x, int groups);

// Row-wise binary mask marking the k largest entries; ties keep the lowest
// column index.
Matrix topk_mask(const Matrix& scores, int k);

// Row softmax of Q K^T / lambda restricted to each row's top-k logits
// (excluded entries act as -inf), then applied to V. Every output row is a
// convex combination of exactly k rows of V.
Matrix sparse_attention(const Matrix& q, const Matrix& k_mat, const Matrix& v,
                        int k, double lambda);

// Non-overlapping p x p patches in row-major patch order; token components
// ordered (channel, row in patch, col in patch).
Matrix tokenize(const FeatureTensor& x, int patch);
FeatureTensor detokenize(const Matrix& tokens, int channels, int height,
                         int width, int patch);

struct AttentionParams {
  double lambda = 1.0;                   // softmax temperature, > 0
  std::array<double, 4> alpha_logits{};  // fusion weights through softmax
  int shuffle_groups = 1;
  Matrix wq, wk, wv;                     // d x d token projections
  ConvLayer conv2, conv3;                // channel-shuffled convolution branch

  // Sparsity ladder {N/2, 2N/3, 3N/4, 4N/5}, floored and clamped to >= 1.
  static std::array<int, 4> sparsity_levels(int n_tokens);

  // softmax(alpha_logits); always sums to 1.
  std::array<double, 4> fusion_weights() const;

  // Parameters sized for feature maps with `channels` channels tokenized at
  // patch size `patch`; lambda defaults to sqrt(d).
  static AttentionParams seeded(std::uint64_t seed, int channels, int patch);
};

// Multi-scale sparse attention over patch tokens, fused across the four
// sparsity levels, plus the channel-shuffled convolution branch. Shape
// preserving.
FeatureTensor mca_forward(const FeatureTensor& x, const AttentionParams& params,
                          const BlockConfig& cfg);

// Two stride-2 descents, mca_forward at the bottleneck, two ascents with skip
// concatenation, then a 1-channel projection back to an image of the input
// size. Expects d1 from vswd_forward with the same cfg.
Image umca_forward(const FeatureTensor& d1, const BlockConfig& cfg);

}  // namespace lact
