#include "lact/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace lact {

AngularRange::AngularRange(double theta1, double theta2)
    : theta1_(theta1), theta2_(theta2) {
  if (!(theta1 >= 0.0) || !(theta2 <= kPi + 1e-12) || !(theta1 < theta2))
    throw std::invalid_argument(
        "AngularRange: need 0 <= theta1 < theta2 <= pi");
  if (theta2_ > kPi) theta2_ = kPi;
}

AngularRange AngularRange::from_degrees(double deg1, double deg2) {
  return AngularRange(deg1 * kPi / 180.0, deg2 * kPi / 180.0);
}

Geometry::Geometry(std::vector<double> angles, int n_det, double pitch)
    : angles_(std::move(angles)), n_det_(n_det), pitch_(pitch) {
  if (angles_.empty()) throw std::invalid_argument("Geometry: no angles");
  if (n_det_ < 2) throw std::invalid_argument("Geometry: n_det must be >= 2");
  if (!(pitch_ > 0.0)) throw std::invalid_argument("Geometry: pitch <= 0");
  for (std::size_t j = 0; j < angles_.size(); ++j) {
    if (!(angles_[j] >= 0.0) || !(angles_[j] < kPi))
      throw std::invalid_argument("Geometry: angles must lie in [0, pi)");
    if (j > 0 && !(angles_[j] > angles_[j - 1]))
      throw std::invalid_argument("Geometry: angles must be increasing");
  }
  if (angles_.size() >= 3) {
    const double step = angles_[1] - angles_[0];
    for (std::size_t j = 2; j < angles_.size(); ++j) {
      if (std::abs(angles_[j] - angles_[j - 1] - step) > 1e-9 * std::max(1.0, step))
        throw std::invalid_argument("Geometry: angles must be uniformly spaced");
    }
  }
  const double span = n_det_ * pitch_;
  if (span < 2.0 * std::sqrt(2.0) - 1e-9)
    throw std::invalid_argument(
        "Geometry: detector span must cover the image diagonal (2*sqrt(2))");
}

Geometry Geometry::parallel(int n_angles, int n_det, double half_extent) {
  if (n_angles < 1) throw std::invalid_argument("Geometry: n_angles < 1");
  std::vector<double> angles(n_angles);
  for (int j = 0; j < n_angles; ++j) angles[j] = j * kPi / n_angles;
  if (n_det < 1) throw std::invalid_argument("Geometry: n_det < 1");
  return Geometry(std::move(angles), n_det, 2.0 * half_extent / n_det);
}

double Geometry::angle_step() const {
  if (angles_.size() < 2)
    throw std::logic_error("Geometry::angle_step: need at least two angles");
  return angles_[1] - angles_[0];
}

Sinogram::Sinogram(Geometry geom, double fill) : geom_(std::move(geom)) {
  values_.assign(
      static_cast<std::size_t>(geom_.n_angles()) * geom_.n_det(), fill);
}

FilteredSinogram::FilteredSinogram(Geometry geom, double fill)
    : geom_(std::move(geom)) {
  values_.assign(
      static_cast<std::size_t>(geom_.n_angles()) * geom_.n_det(), fill);
}

}  // namespace lact
