#pragma once

#include <vector>

#include "lact/geometry.hpp"
#include "lact/image.hpp"

namespace lact {

// Axis-tilted ellipse with constant additive intensity. tilt is the angle of
// the semi-axis a against the x axis, stored in [0, pi).
struct Ellipse {
  Ellipse(double cx, double cy, double a, double b, double tilt,
          double intensity);

  double cx, cy;
  double a, b;
  double tilt;
  double intensity;

  bool contains(double x, double y) const;

  // Half-width of the support of the projection at angle theta:
  // r(theta) = sqrt(a^2 cos^2(theta-tilt) + b^2 sin^2(theta-tilt)).
  double support_radius(double theta) const;

  // Exact integral of the indicator times intensity along the line
  // x cos(theta) + y sin(theta) = s.
  double line_integral(double theta, double s) const;
};

// Superposition of ellipses; values add where ellipses overlap.
class EllipsePhantom {
 public:
  EllipsePhantom() = default;
  explicit EllipsePhantom(std::vector<Ellipse> ellipses)
      : ellipses_(std::move(ellipses)) {}

  void add(const Ellipse& e) { ellipses_.push_back(e); }
  const std::vector<Ellipse>& ellipses() const { return ellipses_; }

  double value_at(double x, double y) const;

 private:
  std::vector<Ellipse> ellipses_;
};

// Samples the phantom at pixel centers (pure membership test per ellipse,
// no area weighting at boundaries).
Image rasterize(const EllipsePhantom& phantom, int side);

// Closed-form sinogram, exact up to floating point.
Sinogram analytic_sinogram(const EllipsePhantom& phantom, const Geometry& geom);

namespace phantoms {

// Standard head phantom with the softened intensity table (values in [0,1]).
EllipsePhantom shepp_logan();

// Same geometry with the original high-contrast intensities.
EllipsePhantom shepp_logan_original();

// Centered disk, handy as a calibration object.
EllipsePhantom disk(double radius = 0.5, double intensity = 1.0);

}  // namespace phantoms

}  // namespace lact
