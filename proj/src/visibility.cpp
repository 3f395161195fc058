#include "lact/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lact/conv.hpp"
#include "lact/parallel.hpp"

namespace lact {

VisibilityLabel classify_singularity(double nx, double ny,
                                     const AngularRange& range) {
  const double norm2 = nx * nx + ny * ny;
  if (norm2 < 1e-24)
    throw std::invalid_argument("classify_singularity: zero normal");
  double psi = std::atan2(ny, nx);
  while (psi < 0.0) psi += kPi;
  while (psi >= kPi) psi -= kPi;
  const bool visible = range.contains(psi) || range.contains(psi + kPi);
  return visible ? VisibilityLabel::kVisible : VisibilityLabel::kInvisible;
}

std::vector<BoundarySample> ellipse_boundary_samples(const Ellipse& e, int m) {
  if (m < 4)
    throw std::invalid_argument("ellipse_boundary_samples: need m >= 4");
  std::vector<BoundarySample> out;
  out.reserve(m);
  const double cphi = std::cos(e.tilt);
  const double sphi = std::sin(e.tilt);
  for (int i = 0; i < m; ++i) {
    const double t = 2.0 * kPi * i / m;
    const double u = e.a * std::cos(t);
    const double v = e.b * std::sin(t);
    // Gradient of (u/a)^2 + (v/b)^2 in local frame, rotated to world.
    const double gu = std::cos(t) / e.a;
    const double gv = std::sin(t) / e.b;
    double nx = gu * cphi - gv * sphi;
    double ny = gu * sphi + gv * cphi;
    const double len = std::hypot(nx, ny);
    nx /= len;
    ny /= len;
    if (ny < 0.0 || (ny == 0.0 && nx < 0.0)) {
      nx = -nx;
      ny = -ny;
    }
    out.push_back(BoundarySample{e.cx + u * cphi - v * sphi,
                                 e.cy + u * sphi + v * cphi, nx, ny});
  }
  return out;
}

std::vector<ArtifactLine> predicted_artifact_lines(const EllipsePhantom& phantom,
                                                   const AngularRange& range) {
  if (!range.is_limited())
    throw std::invalid_argument(
        "predicted_artifact_lines: range must be limited");
  std::vector<ArtifactLine> lines;
  lines.reserve(4 * phantom.ellipses().size());
  for (const Ellipse& e : phantom.ellipses()) {
    for (const double phi : {range.theta1(), range.theta2()}) {
      const double center = e.cx * std::cos(phi) + e.cy * std::sin(phi);
      const double r = e.support_radius(phi);
      lines.push_back(ArtifactLine{phi, center + r});
      lines.push_back(ArtifactLine{phi, center - r});
    }
  }
  return lines;
}

WeightMap::WeightMap(Image grid) : grid_(std::move(grid)) {
  for (const double v : grid_.values())
    if (v != 1.0 && v != 2.0)
      throw std::invalid_argument("WeightMap: values must be 1 or 2");
}

double default_gradient_threshold(const Image& reference) {
  const Image mag = sobel_magnitude(reference);
  double peak = 0.0;
  for (const double v : mag.values()) peak = std::max(peak, v);
  return std::max(0.1 * peak, 1e-12);
}

WeightMap weight_map(const Image& reference, const AngularRange& range,
                     double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("weight_map: tau must be > 0");
  auto [gx, gy] = sobel_gradients(reference);
  const int n = reference.side();
  const double tau2 = tau * tau;
  Image grid(n, 1.0);
  parallel_for(0, static_cast<std::size_t>(n), [&](std::size_t r) {
    const int i = static_cast<int>(r);
    for (int j = 0; j < n; ++j) {
      const double dx = gx.at(i, j);
      const double dy = gy.at(i, j);
      if (dx * dx + dy * dy < tau2) continue;
      if (classify_singularity(dx, dy, range) == VisibilityLabel::kInvisible)
        grid.at(i, j) = 2.0;
    }
  });
  return WeightMap(std::move(grid));
}

WeightMap weight_map(const Image& reference, const AngularRange& range) {
  return weight_map(reference, range, default_gradient_threshold(reference));
}

}  // namespace lact
