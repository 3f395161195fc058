#include "lact/conv.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

#include "lact/parallel.hpp"

namespace lact {

const double kSobelX[9] = {-1, 0, 1, -2, 0, 2, -1, 0, 1};
const double kSobelY[9] = {-1, -2, -1, 0, 0, 0, 1, 2, 1};

void conv2d_same_replicate(const double* in, int h, int w, const double* k,
                           int kh, int kw, double* out) {
  if (kh % 2 == 0 || kw % 2 == 0)
    throw std::invalid_argument("conv2d: kernel sides must be odd");
  const int ry = kh / 2;
  const int rx = kw / 2;
  for (int i = 0; i < h; ++i) {
    double* orow = out + static_cast<std::size_t>(i) * w;
    std::memset(orow, 0, sizeof(double) * w);
    for (int dy = 0; dy < kh; ++dy) {
      const int si = std::clamp(i + dy - ry, 0, h - 1);
      const double* irow = in + static_cast<std::size_t>(si) * w;
      for (int dx = 0; dx < kw; ++dx) {
        const double kv = k[dy * kw + dx];
        const int off = dx - rx;
        const int j0 = std::max(0, -off);
        const int j1 = std::min(w, w - off);
        if (j0 >= j1) {
          for (int j = 0; j < w; ++j)
            orow[j] += kv * irow[std::clamp(j + off, 0, w - 1)];
          continue;
        }
        for (int j = 0; j < j0; ++j) orow[j] += kv * irow[0];
        for (int j = j0; j < j1; ++j) orow[j] += kv * irow[j + off];
        for (int j = j1; j < w; ++j) orow[j] += kv * irow[w - 1];
      }
    }
  }
}

void conv2d_same_replicate_adjoint(const double* in, int h, int w,
                                   const double* k, int kh, int kw,
                                   double* out) {
  if (kh % 2 == 0 || kw % 2 == 0)
    throw std::invalid_argument("conv2d adjoint: kernel sides must be odd");
  const int ry = kh / 2;
  const int rx = kw / 2;
  std::memset(out, 0, sizeof(double) * h * w);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double g = in[static_cast<std::size_t>(i) * w + j];
      for (int dy = 0; dy < kh; ++dy) {
        const int si = std::clamp(i + dy - ry, 0, h - 1);
        for (int dx = 0; dx < kw; ++dx) {
          const int sj = std::clamp(j + dx - rx, 0, w - 1);
          out[static_cast<std::size_t>(si) * w + sj] += k[dy * kw + dx] * g;
        }
      }
    }
  }
}

Conv2DKernel::Conv2DKernel(int size_, double fill) : size(size_) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("Conv2DKernel: size must be odd >= 1");
  w.assign(static_cast<std::size_t>(size) * size, fill);
}

Conv2DKernel Conv2DKernel::delta(int size) {
  Conv2DKernel k(size);
  k.at(size / 2, size / 2) = 1.0;
  return k;
}

Conv2DKernel Conv2DKernel::seeded(SplitMix64& rng, int size) {
  Conv2DKernel k(size);
  const double bound = 1.0 / size;  // 1/sqrt(size*size)
  for (double& v : k.w) v = rng.uniform(-bound, bound);
  return k;
}

FeatureTensor depthwise_conv(const FeatureTensor& x, const Conv2DKernel& k) {
  FeatureTensor out(x.channels(), x.height(), x.width());
  parallel_for(0, static_cast<std::size_t>(x.channels()), [&](std::size_t c) {
    conv2d_same_replicate(x.channel(static_cast<int>(c)), x.height(),
                          x.width(), k.w.data(), k.size, k.size,
                          out.channel(static_cast<int>(c)));
  });
  return out;
}

ConvLayer::ConvLayer(int in_c, int out_c, int k)
    : in_c_(in_c), out_c_(out_c), k_(k) {
  if (in_c < 1 || out_c < 1) throw std::invalid_argument("ConvLayer: channels");
  if (k < 1 || k % 2 == 0)
    throw std::invalid_argument("ConvLayer: kernel must be odd >= 1");
  w_.assign(static_cast<std::size_t>(out_c) * in_c * k * k, 0.0);
}

ConvLayer ConvLayer::seeded(SplitMix64& rng, int in_c, int out_c, int k) {
  ConvLayer layer(in_c, out_c, k);
  const double bound = 1.0 / std::sqrt(static_cast<double>(in_c) * k * k);
  for (double& v : layer.w_) v = rng.uniform(-bound, bound);
  return layer;
}

FeatureTensor ConvLayer::apply(const FeatureTensor& x, int stride) const {
  if (x.channels() != in_c_)
    throw std::invalid_argument("ConvLayer::apply: channel mismatch");
  if (stride != 1 && stride != 2)
    throw std::invalid_argument("ConvLayer::apply: stride must be 1 or 2");
  const int h = x.height(), w = x.width();
  const int pad = k_ / 2;
  const int ph = h + k_ - 1, pw = w + k_ - 1;

  // Replicate-pad every input channel once; all output channels then read
  // contiguous rows, which keeps the inner loops vectorizable.
  std::vector<double> padded(static_cast<std::size_t>(in_c_) * ph * pw);
  parallel_for(0, static_cast<std::size_t>(in_c_), [&](std::size_t ci) {
    const double* src = x.channel(static_cast<int>(ci));
    double* dst = padded.data() + ci * ph * pw;
    for (int i = 0; i < ph; ++i) {
      const int si = std::clamp(i - pad, 0, h - 1);
      const double* srow = src + static_cast<std::size_t>(si) * w;
      double* drow = dst + static_cast<std::size_t>(i) * pw;
      for (int j = 0; j < pad; ++j) drow[j] = srow[0];
      std::memcpy(drow + pad, srow, sizeof(double) * w);
      for (int j = 0; j < pad; ++j) drow[pad + w + j] = srow[w - 1];
    }
  });

  const int oh = (h + stride - 1) / stride;
  const int ow = (w + stride - 1) / stride;
  FeatureTensor out(out_c_, oh, ow);
  parallel_for(0, static_cast<std::size_t>(out_c_), [&](std::size_t oc) {
    double* ochan = out.channel(static_cast<int>(oc));
    const double* wbase =
        w_.data() + oc * static_cast<std::size_t>(in_c_) * k_ * k_;
    // Blocks of the output row ride through all kernel taps in registers;
    // each element still accumulates in fixed (ic, ky, kx) order.
    constexpr int kBlock = 64;
    double acc[kBlock];
    for (int ic = 0; ic < in_c_; ++ic) {
      const double* pchan = padded.data() + static_cast<std::size_t>(ic) * ph * pw;
      const double* wchan = wbase + static_cast<std::size_t>(ic) * k_ * k_;
      for (int oi = 0; oi < oh; ++oi) {
        double* orow = ochan + static_cast<std::size_t>(oi) * ow;
        const double* pbase =
            pchan + static_cast<std::size_t>(stride * oi) * pw;
        for (int j0 = 0; j0 < ow; j0 += kBlock) {
          const int jb = std::min(kBlock, ow - j0);
          std::memcpy(acc, orow + j0, sizeof(double) * jb);
          for (int ky = 0; ky < k_; ++ky) {
            const double* prow =
                pbase + static_cast<std::size_t>(ky) * pw + stride * j0;
            for (int kx = 0; kx < k_; ++kx) {
              const double wv = wchan[ky * k_ + kx];
              const double* p = prow + kx;
              if (stride == 1) {
                for (int j = 0; j < jb; ++j) acc[j] += wv * p[j];
              } else {
                for (int j = 0; j < jb; ++j) acc[j] += wv * p[2 * j];
              }
            }
          }
          std::memcpy(orow + j0, acc, sizeof(double) * jb);
        }
      }
    }
  });
  return out;
}

std::pair<Image, Image> sobel_gradients(const Image& img) {
  Image gx(img.side()), gy(img.side());
  conv2d_same_replicate(img.values().data(), img.side(), img.side(), kSobelX,
                        3, 3, gx.values().data());
  conv2d_same_replicate(img.values().data(), img.side(), img.side(), kSobelY,
                        3, 3, gy.values().data());
  return {std::move(gx), std::move(gy)};
}

Image sobel_magnitude(const Image& img) {
  auto [gx, gy] = sobel_gradients(img);
  Image mag(img.side());
  for (std::size_t i = 0; i < mag.values().size(); ++i)
    mag.values()[i] = std::hypot(gx.values()[i], gy.values()[i]);
  return mag;
}

FeatureTensor upsample_nearest2(const FeatureTensor& x) {
  FeatureTensor out(x.channels(), 2 * x.height(), 2 * x.width());
  parallel_for(0, static_cast<std::size_t>(x.channels()), [&](std::size_t c) {
    const int ci = static_cast<int>(c);
    for (int i = 0; i < out.height(); ++i)
      for (int j = 0; j < out.width(); ++j)
        out.at(ci, i, j) = x.at(ci, i / 2, j / 2);
  });
  return out;
}

FeatureTensor concat_channels(const FeatureTensor& a, const FeatureTensor& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("concat_channels: spatial shape mismatch");
  FeatureTensor out(a.channels() + b.channels(), a.height(), a.width());
  std::memcpy(out.channel(0), a.values().data(),
              sizeof(double) * a.values().size());
  std::memcpy(out.channel(a.channels()), b.values().data(),
              sizeof(double) * b.values().size());
  return out;
}

}  // namespace lact
