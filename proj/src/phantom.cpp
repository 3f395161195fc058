#include "lact/phantom.hpp"

#include <cmath>
#include <stdexcept>

#include "lact/parallel.hpp"

namespace lact {

Ellipse::Ellipse(double cx_, double cy_, double a_, double b_, double tilt_,
                 double intensity_)
    : cx(cx_), cy(cy_), a(a_), b(b_), tilt(tilt_), intensity(intensity_) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("Ellipse: semi-axes must be positive");
  while (tilt < 0.0) tilt += kPi;
  while (tilt >= kPi) tilt -= kPi;
}

bool Ellipse::contains(double x, double y) const {
  const double dx = x - cx;
  const double dy = y - cy;
  const double ct = std::cos(tilt);
  const double st = std::sin(tilt);
  const double u = (dx * ct + dy * st) / a;
  const double v = (-dx * st + dy * ct) / b;
  return u * u + v * v <= 1.0;
}

double Ellipse::support_radius(double theta) const {
  const double c = std::cos(theta - tilt);
  const double s = std::sin(theta - tilt);
  return std::sqrt(a * a * c * c + b * b * s * s);
}

double Ellipse::line_integral(double theta, double s) const {
  const double r = support_radius(theta);
  const double sp = s - (cx * std::cos(theta) + cy * std::sin(theta));
  const double r2 = r * r;
  const double d2 = r2 - sp * sp;
  if (d2 <= 0.0) return 0.0;
  return intensity * 2.0 * a * b * std::sqrt(d2) / r2;
}

double EllipsePhantom::value_at(double x, double y) const {
  double v = 0.0;
  for (const Ellipse& e : ellipses_)
    if (e.contains(x, y)) v += e.intensity;
  return v;
}

Image rasterize(const EllipsePhantom& phantom, int side) {
  Image img(side);
  parallel_for(0, static_cast<std::size_t>(side), [&](std::size_t r) {
    const int i = static_cast<int>(r);
    const double y = img.y_of(i);
    double* row = img.row(i);
    for (int j = 0; j < side; ++j) row[j] = phantom.value_at(img.x_of(j), y);
  });
  return img;
}

Sinogram analytic_sinogram(const EllipsePhantom& phantom,
                           const Geometry& geom) {
  Sinogram sino(geom);
  parallel_for(0, static_cast<std::size_t>(geom.n_angles()), [&](std::size_t a) {
    const int j = static_cast<int>(a);
    const double theta = geom.angle(j);
    double* row = sino.row(j);
    for (int k = 0; k < geom.n_det(); ++k) {
      const double s = geom.s_of(k);
      double v = 0.0;
      for (const Ellipse& e : phantom.ellipses()) v += e.line_integral(theta, s);
      row[k] = v;
    }
  });
  return sino;
}

namespace phantoms {

namespace {

// Head phantom geometry shared by both intensity tables. Columns:
// x-center, y-center, x-half-axis, y-half-axis, rotation (degrees).
struct HeadRow {
  double cx, cy, a, b, phi_deg;
};

constexpr HeadRow kHeadRows[10] = {
    {0.0, 0.0, 0.69, 0.92, 0.0},       {0.0, -0.0184, 0.6624, 0.874, 0.0},
    {0.22, 0.0, 0.11, 0.31, -18.0},    {-0.22, 0.0, 0.16, 0.41, 18.0},
    {0.0, 0.35, 0.21, 0.25, 0.0},      {0.0, 0.1, 0.046, 0.046, 0.0},
    {0.0, -0.1, 0.046, 0.046, 0.0},    {-0.08, -0.605, 0.046, 0.023, 0.0},
    {0.0, -0.606, 0.023, 0.023, 0.0},  {0.06, -0.605, 0.023, 0.046, 0.0}};

EllipsePhantom head_with(const double (&intensities)[10]) {
  EllipsePhantom p;
  for (int i = 0; i < 10; ++i) {
    const HeadRow& r = kHeadRows[i];
    p.add(Ellipse(r.cx, r.cy, r.a, r.b, r.phi_deg * kPi / 180.0,
                  intensities[i]));
  }
  return p;
}

}  // namespace

EllipsePhantom shepp_logan() {
  static const double kSoft[10] = {1.0, -0.8, -0.2, -0.2, 0.1,
                                   0.1, 0.1,  0.1,  0.1,  0.1};
  return head_with(kSoft);
}

EllipsePhantom shepp_logan_original() {
  static const double kOriginal[10] = {2.0,  -0.98, -0.02, -0.02, 0.01,
                                       0.01, 0.01,  0.01,  0.01,  0.01};
  return head_with(kOriginal);
}

EllipsePhantom disk(double radius, double intensity) {
  EllipsePhantom p;
  p.add(Ellipse(0.0, 0.0, radius, radius, 0.0, intensity));
  return p;
}

}  // namespace phantoms

}  // namespace lact
