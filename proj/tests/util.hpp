#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "lact/geometry.hpp"
#include "lact/image.hpp"
#include "lact/rng.hpp"

namespace testutil {

// Sum of a few random Gaussian bumps. Smooth fields keep discretization
// error out of operator-level comparisons that hold exactly only in the
// continuum.
inline lact::Image smooth_image(std::uint64_t seed, int n) {
  lact::SplitMix64 rng(seed);
  struct Bump {
    double a, x, y, s;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < 6; ++i)
    bumps.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-0.6, 0.6),
                     rng.uniform(-0.6, 0.6), rng.uniform(0.12, 0.3)});
  lact::Image img(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = img.x_of(j), y = img.y_of(i);
      double v = 0.0;
      for (const Bump& b : bumps) {
        const double dx = x - b.x, dy = y - b.y;
        v += b.a * std::exp(-(dx * dx + dy * dy) / (2.0 * b.s * b.s));
      }
      img.at(i, j) = v;
    }
  return img;
}

inline lact::Sinogram smooth_sinogram(std::uint64_t seed,
                                      const lact::Geometry& geom) {
  lact::SplitMix64 rng(seed);
  struct Wave {
    double a, s0, w, m, phase;
  };
  std::vector<Wave> waves;
  for (int i = 0; i < 6; ++i)
    waves.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-0.8, 0.8),
                     rng.uniform(0.15, 0.35),
                     static_cast<double>(rng.next_u64() % 4),
                     rng.uniform(0.0, 2.0 * lact::kPi)});
  lact::Sinogram sino(geom);
  for (int j = 0; j < geom.n_angles(); ++j)
    for (int k = 0; k < geom.n_det(); ++k) {
      const double theta = geom.angle(j), s = geom.s_of(k);
      double v = 0.0;
      for (const Wave& w : waves) {
        const double ds = s - w.s0;
        v += w.a * std::exp(-ds * ds / (2.0 * w.w * w.w)) *
             std::cos(w.m * theta + w.phase);
      }
      sino.at(j, k) = v;
    }
  return sino;
}

// Detector grid with pitch chosen so that dtheta * pitch equals the pixel
// area of an n-sided image grid. With that match the plain-sum inner products
// of the projector pair approximate each other with no systematic factor.
inline lact::Geometry commensurate_geometry(int n, int n_angles, int n_det) {
  std::vector<double> angles(n_angles);
  for (int j = 0; j < n_angles; ++j) angles[j] = j * lact::kPi / n_angles;
  const double h = 2.0 / n;
  const double pitch = h * h * n_angles / lact::kPi;
  return lact::Geometry(std::move(angles), n_det, pitch);
}

inline std::vector<char> read_bytes(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  return std::vector<char>(std::istreambuf_iterator<char>(f),
                           std::istreambuf_iterator<char>());
}

inline bool same_bytes(const std::string& a, const std::string& b) {
  const std::vector<char> va = read_bytes(a), vb = read_bytes(b);
  return !va.empty() && va == vb;
}

}  // namespace testutil
