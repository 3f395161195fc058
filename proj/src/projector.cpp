#include "lact/projector.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lact/parallel.hpp"

namespace lact {

namespace {

// Clips the parameter t of the ray p(t) = s*(c,si) + t*(-si,c) against the
// slab |coord| <= bound, where coord(t) = offset + slope * t.
bool clip_slab(double offset, double slope, double bound, double& t0,
               double& t1) {
  if (std::abs(slope) < 1e-15) return std::abs(offset) <= bound;
  double lo = (-bound - offset) / slope;
  double hi = (bound - offset) / slope;
  if (lo > hi) std::swap(lo, hi);
  t0 = std::max(t0, lo);
  t1 = std::min(t1, hi);
  return t0 < t1;
}

}  // namespace

Sinogram forward_project(const Image& img, const Geometry& geom, double step) {
  if (!(step > 0.0) || step > img.pixel_width() + 1e-12)
    throw std::invalid_argument(
        "forward_project: step must be in (0, pixel width]");
  Sinogram sino(geom);
  const double bound = 1.0 + 0.5 * img.pixel_width();
  parallel_for(0, static_cast<std::size_t>(geom.n_angles()), [&](std::size_t a) {
    const int j = static_cast<int>(a);
    const double c = std::cos(geom.angle(j));
    const double si = std::sin(geom.angle(j));
    double* row = sino.row(j);
    for (int k = 0; k < geom.n_det(); ++k) {
      const double s = geom.s_of(k);
      // x(t) = s*c - t*si, y(t) = s*si + t*c
      double t0 = -std::numeric_limits<double>::infinity();
      double t1 = std::numeric_limits<double>::infinity();
      if (!clip_slab(s * c, -si, bound, t0, t1) ||
          !clip_slab(s * si, c, bound, t0, t1)) {
        row[k] = 0.0;
        continue;
      }
      const double len = t1 - t0;
      const int m = static_cast<int>(std::ceil(len / step));
      const double tm = 0.5 * (t0 + t1);
      double acc = 0.0;
      for (int i = 0; i < m; ++i) {
        const double t = tm + (i - 0.5 * (m - 1)) * step;
        acc += img.sample(s * c - t * si, s * si + t * c);
      }
      row[k] = acc * step;
    }
  });
  return sino;
}

Sinogram forward_project(const Image& img, const Geometry& geom) {
  return forward_project(img, geom, 0.5 * img.pixel_width());
}

namespace {

Image back_project_impl(const Geometry& geom, const std::vector<double>& data,
                        const AngularRange& range, int side) {
  std::vector<int> selected;
  for (int j = 0; j < geom.n_angles(); ++j)
    if (range.contains(geom.angle(j))) selected.push_back(j);
  if (selected.empty())
    throw std::invalid_argument("back_project: range selects no angles");

  const double dtheta = geom.angle_step();
  const int n_det = geom.n_det();
  const double s0 = geom.s_of(0);
  const double inv_pitch = 1.0 / geom.pitch();

  std::vector<double> cs(selected.size()), sn(selected.size());
  std::vector<const double*> rows(selected.size());
  for (std::size_t i = 0; i < selected.size(); ++i) {
    cs[i] = std::cos(geom.angle(selected[i]));
    sn[i] = std::sin(geom.angle(selected[i]));
    rows[i] = data.data() + static_cast<std::size_t>(selected[i]) * n_det;
  }

  Image out(side);
  parallel_for(0, static_cast<std::size_t>(side), [&](std::size_t r) {
    const int i = static_cast<int>(r);
    const double y = out.y_of(i);
    double* orow = out.row(i);
    for (int jx = 0; jx < side; ++jx) {
      const double x = out.x_of(jx);
      double acc = 0.0;
      for (std::size_t v = 0; v < selected.size(); ++v) {
        const double s = x * cs[v] + y * sn[v];
        const double u = (s - s0) * inv_pitch;
        const int k0 = static_cast<int>(std::floor(u));
        const double f = u - k0;
        double val = 0.0;
        if (k0 >= 0 && k0 < n_det) val += (1.0 - f) * rows[v][k0];
        if (k0 + 1 >= 0 && k0 + 1 < n_det) val += f * rows[v][k0 + 1];
        acc += val;
      }
      orow[jx] = acc * dtheta;
    }
  });
  return out;
}

}  // namespace

Image back_project(const Sinogram& sino, const AngularRange& range, int side) {
  return back_project_impl(sino.geometry(), sino.values(), range, side);
}

Image back_project(const FilteredSinogram& sino, const AngularRange& range,
                   int side) {
  return back_project_impl(sino.geometry(), sino.values(), range, side);
}

}  // namespace lact
