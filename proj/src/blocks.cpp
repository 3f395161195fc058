#include "lact/blocks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "lact/parallel.hpp"

namespace lact {

FeatureTensor sobel_edge_fuse(const FeatureTensor& x) {
  FeatureTensor out(x.channels(), x.height(), x.width());
  parallel_for(0, static_cast<std::size_t>(x.channels()), [&](std::size_t ci) {
    const int c = static_cast<int>(ci);
    const int h = x.height(), w = x.width();
    std::vector<double> gx(static_cast<std::size_t>(h) * w);
    std::vector<double> gy(gx.size());
    conv2d_same_replicate(x.channel(c), h, w, kSobelX, 3, 3, gx.data());
    conv2d_same_replicate(x.channel(c), h, w, kSobelY, 3, 3, gy.data());
    const double* src = x.channel(c);
    double* dst = out.channel(c);
    for (std::size_t i = 0; i < gx.size(); ++i) dst[i] = src[i] + gx[i] + gy[i];
  });
  return out;
}

Subbands dwt2(const FeatureTensor& x) {
  if (x.height() % 2 != 0 || x.width() % 2 != 0)
    throw std::invalid_argument("dwt2: H and W must be even");
  const int c = x.channels(), h2 = x.height() / 2, w2 = x.width() / 2;
  Subbands sb{FeatureTensor(c, h2, w2), FeatureTensor(c, h2, w2),
              FeatureTensor(c, h2, w2), FeatureTensor(c, h2, w2)};
  parallel_for(0, static_cast<std::size_t>(c), [&](std::size_t ci) {
    const int cc = static_cast<int>(ci);
    for (int i = 0; i < h2; ++i) {
      for (int j = 0; j < w2; ++j) {
        const double a = x.at(cc, 2 * i, 2 * j);
        const double b = x.at(cc, 2 * i, 2 * j + 1);
        const double d = x.at(cc, 2 * i + 1, 2 * j);
        const double e = x.at(cc, 2 * i + 1, 2 * j + 1);
        sb.ll.at(cc, i, j) = 0.5 * (a + b + d + e);
        sb.lh.at(cc, i, j) = 0.5 * (a - b + d - e);
        sb.hl.at(cc, i, j) = 0.5 * (a + b - d - e);
        sb.hh.at(cc, i, j) = 0.5 * (a - b - d + e);
      }
    }
  });
  return sb;
}

FeatureTensor idwt2(const FeatureTensor& ll, const FeatureTensor& lh,
                    const FeatureTensor& hl, const FeatureTensor& hh) {
  if (!ll.same_shape(lh) || !ll.same_shape(hl) || !ll.same_shape(hh))
    throw std::invalid_argument("idwt2: subband shapes differ");
  const int c = ll.channels(), h2 = ll.height(), w2 = ll.width();
  FeatureTensor out(c, 2 * h2, 2 * w2);
  parallel_for(0, static_cast<std::size_t>(c), [&](std::size_t ci) {
    const int cc = static_cast<int>(ci);
    for (int i = 0; i < h2; ++i) {
      for (int j = 0; j < w2; ++j) {
        const double l = ll.at(cc, i, j);
        const double m = lh.at(cc, i, j);
        const double p = hl.at(cc, i, j);
        const double q = hh.at(cc, i, j);
        out.at(cc, 2 * i, 2 * j) = 0.5 * (l + m + p + q);
        out.at(cc, 2 * i, 2 * j + 1) = 0.5 * (l - m + p - q);
        out.at(cc, 2 * i + 1, 2 * j) = 0.5 * (l + m - p - q);
        out.at(cc, 2 * i + 1, 2 * j + 1) = 0.5 * (l - m - p + q);
      }
    }
  });
  return out;
}

FeatureTensor idwt2(const Subbands& sb) {
  return idwt2(sb.ll, sb.lh, sb.hl, sb.hh);
}

KernelSet KernelSet::delta(int size) {
  return KernelSet{Conv2DKernel::delta(size), Conv2DKernel::delta(size),
                   Conv2DKernel::delta(size), Conv2DKernel::delta(size),
                   Conv2DKernel::delta(size)};
}

KernelSet KernelSet::seeded(SplitMix64& rng, int size) {
  KernelSet ks;
  ks.k0 = Conv2DKernel::seeded(rng, size);
  ks.k1 = Conv2DKernel::seeded(rng, size);
  ks.k2 = Conv2DKernel::seeded(rng, size);
  ks.k3 = Conv2DKernel::seeded(rng, size);
  ks.k4 = Conv2DKernel::seeded(rng, size);
  return ks;
}

FeatureTensor wtconv(const FeatureTensor& x, const KernelSet& kernels) {
  const Subbands sb = dwt2(x);
  FeatureTensor direct = depthwise_conv(x, kernels.k0);
  const FeatureTensor rec =
      idwt2(depthwise_conv(sb.ll, kernels.k1), depthwise_conv(sb.lh, kernels.k2),
            depthwise_conv(sb.hl, kernels.k3), depthwise_conv(sb.hh, kernels.k4));
  for (std::size_t i = 0; i < direct.size(); ++i)
    direct.values()[i] += rec.values()[i];
  return direct;
}

FeatureTensor channel_shuffle(const FeatureTensor& x, int groups) {
  if (groups < 1 || x.channels() % groups != 0)
    throw std::invalid_argument("channel_shuffle: groups must divide C");
  const int per = x.channels() / groups;
  FeatureTensor out(x.channels(), x.height(), x.width());
  const std::size_t plane = static_cast<std::size_t>(x.height()) * x.width();
  for (int i = 0; i < groups; ++i) {
    for (int j = 0; j < per; ++j) {
      const double* src = x.channel(i * per + j);
      double* dst = out.channel(j * groups + i);
      std::copy(src, src + plane, dst);
    }
  }
  return out;
}

namespace {

// Indices of the k largest entries of a row, ties to the lowest index,
// returned ascending.
std::vector<int> topk_indices(const double* row, int n, int k) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + k, idx.end(),
                    [&](int a, int b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return a < b;
                    });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

Matrix topk_mask(const Matrix& scores, int k) {
  if (k < 1 || k > scores.cols())
    throw std::invalid_argument("topk_mask: k out of range");
  Matrix mask(scores.rows(), scores.cols(), 0.0);
  for (int r = 0; r < scores.rows(); ++r)
    for (const int c : topk_indices(scores.row(r), scores.cols(), k))
      mask.at(r, c) = 1.0;
  return mask;
}

Matrix sparse_attention(const Matrix& q, const Matrix& k_mat, const Matrix& v,
                        int k, double lambda) {
  if (q.cols() != k_mat.cols() || k_mat.rows() != v.rows())
    throw std::invalid_argument("sparse_attention: dimension mismatch");
  if (k < 1 || k > k_mat.rows())
    throw std::invalid_argument("sparse_attention: k out of range");
  if (!(lambda > 0.0))
    throw std::invalid_argument("sparse_attention: lambda must be > 0");

  Matrix logits = matmul(q, transpose(k_mat));
  for (double& l : logits.values()) l /= lambda;

  Matrix out(q.rows(), v.cols(), 0.0);
  std::vector<double> weights;
  for (int r = 0; r < q.rows(); ++r) {
    const std::vector<int> sel =
        topk_indices(logits.row(r), logits.cols(), k);
    double peak = logits.at(r, sel[0]);
    for (const int c : sel) peak = std::max(peak, logits.at(r, c));
    weights.assign(sel.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < sel.size(); ++i) {
      weights[i] = std::exp(logits.at(r, sel[i]) - peak);
      sum += weights[i];
    }
    double* orow = out.row(r);
    for (std::size_t i = 0; i < sel.size(); ++i) {
      const double w = weights[i] / sum;
      const double* vrow = v.row(sel[i]);
      for (int c = 0; c < v.cols(); ++c) orow[c] += w * vrow[c];
    }
  }
  return out;
}

Matrix tokenize(const FeatureTensor& x, int patch) {
  if (patch < 1 || x.height() % patch != 0 || x.width() % patch != 0)
    throw std::invalid_argument("tokenize: patch must divide H and W");
  const int gh = x.height() / patch, gw = x.width() / patch;
  const int d = x.channels() * patch * patch;
  Matrix tokens(gh * gw, d);
  for (int pi = 0; pi < gh; ++pi) {
    for (int pj = 0; pj < gw; ++pj) {
      double* trow = tokens.row(pi * gw + pj);
      int comp = 0;
      for (int c = 0; c < x.channels(); ++c)
        for (int r = 0; r < patch; ++r)
          for (int col = 0; col < patch; ++col)
            trow[comp++] = x.at(c, pi * patch + r, pj * patch + col);
    }
  }
  return tokens;
}

FeatureTensor detokenize(const Matrix& tokens, int channels, int height,
                         int width, int patch) {
  if (patch < 1 || height % patch != 0 || width % patch != 0)
    throw std::invalid_argument("detokenize: patch must divide H and W");
  const int gh = height / patch, gw = width / patch;
  if (tokens.rows() != gh * gw ||
      tokens.cols() != channels * patch * patch)
    throw std::invalid_argument("detokenize: token shape mismatch");
  FeatureTensor x(channels, height, width);
  for (int pi = 0; pi < gh; ++pi) {
    for (int pj = 0; pj < gw; ++pj) {
      const double* trow = tokens.row(pi * gw + pj);
      int comp = 0;
      for (int c = 0; c < channels; ++c)
        for (int r = 0; r < patch; ++r)
          for (int col = 0; col < patch; ++col)
            x.at(c, pi * patch + r, pj * patch + col) = trow[comp++];
    }
  }
  return x;
}

std::array<int, 4> AttentionParams::sparsity_levels(int n_tokens) {
  if (n_tokens < 1)
    throw std::invalid_argument("sparsity_levels: need at least one token");
  auto clamp1 = [](int v) { return std::max(1, v); };
  return {clamp1(n_tokens / 2), clamp1(2 * n_tokens / 3),
          clamp1(3 * n_tokens / 4), clamp1(4 * n_tokens / 5)};
}

std::array<double, 4> AttentionParams::fusion_weights() const {
  const double peak =
      *std::max_element(alpha_logits.begin(), alpha_logits.end());
  std::array<double, 4> w{};
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    w[i] = std::exp(alpha_logits[i] - peak);
    sum += w[i];
  }
  for (double& v : w) v /= sum;
  return w;
}

AttentionParams AttentionParams::seeded(std::uint64_t seed, int channels,
                                        int patch) {
  if (channels < 1 || patch < 1)
    throw std::invalid_argument("AttentionParams: bad dimensions");
  SplitMix64 rng(seed);
  const int d = channels * patch * patch;
  const double bound = 1.0 / std::sqrt(static_cast<double>(d));
  AttentionParams p;
  p.lambda = std::sqrt(static_cast<double>(d));
  p.wq = Matrix(d, d);
  p.wk = Matrix(d, d);
  p.wv = Matrix(d, d);
  for (double& v : p.wq.values()) v = rng.uniform(-bound, bound);
  for (double& v : p.wk.values()) v = rng.uniform(-bound, bound);
  for (double& v : p.wv.values()) v = rng.uniform(-bound, bound);
  for (double& v : p.alpha_logits) v = rng.uniform(-1.0, 1.0);
  p.conv2 = ConvLayer::seeded(rng, channels, channels, 3);
  p.conv3 = ConvLayer::seeded(rng, channels, channels, 3);
  p.shuffle_groups = (channels % 2 == 0) ? 2 : 1;
  return p;
}

FeatureTensor mca_forward(const FeatureTensor& x, const AttentionParams& params,
                          const BlockConfig& cfg) {
  const int d = x.channels() * cfg.patch * cfg.patch;
  if (params.wq.rows() != d || params.wq.cols() != d)
    throw std::invalid_argument("mca_forward: params sized for another shape");

  const Matrix tokens = tokenize(x, cfg.patch);
  const Matrix q = matmul(tokens, params.wq);
  const Matrix k = matmul(tokens, params.wk);
  const Matrix v = matmul(tokens, params.wv);

  const std::array<int, 4> levels =
      AttentionParams::sparsity_levels(tokens.rows());
  const std::array<double, 4> alphas = params.fusion_weights();
  Matrix fused(tokens.rows(), d, 0.0);
  for (int m = 0; m < 4; ++m) {
    const Matrix am = sparse_attention(q, k, v, levels[m], params.lambda);
    for (std::size_t i = 0; i < fused.values().size(); ++i)
      fused.values()[i] += alphas[m] * am.values()[i];
  }
  FeatureTensor out =
      detokenize(fused, x.channels(), x.height(), x.width(), cfg.patch);

  const FeatureTensor mixed =
      channel_shuffle(params.conv2.apply(x), params.shuffle_groups);
  const FeatureTensor conv_branch = params.conv3.apply(mixed);
  for (std::size_t i = 0; i < out.size(); ++i)
    out.values()[i] += conv_branch.values()[i];
  return out;
}

namespace {

struct VswdParams {
  KernelSet ks_fe;
  ConvLayer conv_in;
  KernelSet ks[3];
  ConvLayer enc[3];
  ConvLayer dec[3];
};

VswdParams make_vswd_params(const BlockConfig& cfg) {
  SplitMix64 rng(substream_seed(cfg.seed, 1));
  const int c = cfg.channels;
  VswdParams p;
  p.ks_fe = KernelSet::seeded(rng);
  p.conv_in = ConvLayer::seeded(rng, 1, c, 3);
  for (int i = 0; i < 3; ++i) {
    p.ks[i] = KernelSet::seeded(rng);
    p.enc[i] = ConvLayer::seeded(rng, c << i, c << (i + 1), 3);
  }
  p.dec[0] = ConvLayer::seeded(rng, 12 * c, 4 * c, 3);
  p.dec[1] = ConvLayer::seeded(rng, 6 * c, 2 * c, 3);
  p.dec[2] = ConvLayer::seeded(rng, 3 * c, c, 3);
  return p;
}

}  // namespace

FeatureTensor vswd_forward(const Image& image, const BlockConfig& cfg) {
  if (cfg.channels < 1) throw std::invalid_argument("vswd_forward: channels");
  if (image.side() % 8 != 0)
    throw std::invalid_argument("vswd_forward: side must be divisible by 8");
  const VswdParams p = make_vswd_params(cfg);

  const FeatureTensor fe =
      sobel_edge_fuse(FeatureTensor::from_image(image));
  const FeatureTensor x1 = p.conv_in.apply(wtconv(fe, p.ks_fe));
  const FeatureTensor x2 = p.enc[0].apply(wtconv(x1, p.ks[0]), 2);
  const FeatureTensor x3 = p.enc[1].apply(wtconv(x2, p.ks[1]), 2);
  const FeatureTensor x4 = p.enc[2].apply(wtconv(x3, p.ks[2]), 2);

  const FeatureTensor d3 = p.dec[0].apply(concat_channels(upsample_nearest2(x4), x3));
  const FeatureTensor d2 = p.dec[1].apply(concat_channels(upsample_nearest2(d3), x2));
  return p.dec[2].apply(concat_channels(upsample_nearest2(d2), x1));
}

Image umca_forward(const FeatureTensor& d1, const BlockConfig& cfg) {
  const int c = cfg.channels;
  if (d1.channels() != c)
    throw std::invalid_argument("umca_forward: channel width differs from cfg");
  if (d1.height() % 4 != 0 || d1.width() % 4 != 0 ||
      d1.height() != d1.width())
    throw std::invalid_argument("umca_forward: need square dims divisible by 4");

  SplitMix64 rng(substream_seed(cfg.seed, 2));
  const ConvLayer down1 = ConvLayer::seeded(rng, c, 2 * c, 3);
  const ConvLayer down2 = ConvLayer::seeded(rng, 2 * c, 4 * c, 3);
  const AttentionParams attn =
      AttentionParams::seeded(rng.next_u64(), 4 * c, cfg.patch);
  const ConvLayer up1 = ConvLayer::seeded(rng, 6 * c, 2 * c, 3);
  const ConvLayer up2 = ConvLayer::seeded(rng, 3 * c, c, 3);
  const ConvLayer proj = ConvLayer::seeded(rng, c, 1, 3);

  const FeatureTensor e1 = down1.apply(d1, 2);
  const FeatureTensor e2 = down2.apply(e1, 2);
  const FeatureTensor b = mca_forward(e2, attn, cfg);
  const FeatureTensor u1 = up1.apply(concat_channels(upsample_nearest2(b), e1));
  const FeatureTensor u2 = up2.apply(concat_channels(upsample_nearest2(u1), d1));
  return proj.apply(u2).to_image();
}

}  // namespace lact
