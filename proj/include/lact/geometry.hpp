#pragma once

#include <numbers>
#include <vector>

namespace lact {

inline constexpr double kPi = std::numbers::pi;

// Closed interval of projection angles [theta1, theta2] in radians with
// 0 <= theta1 < theta2 <= pi. An interval narrower than pi is "limited".
class AngularRange {
 public:
  AngularRange(double theta1, double theta2);

  static AngularRange full() { return AngularRange(0.0, kPi); }
  static AngularRange from_degrees(double deg1, double deg2);

  double theta1() const { return theta1_; }
  double theta2() const { return theta2_; }
  double width() const { return theta2_ - theta1_; }
  bool is_limited() const { return width() < kPi - 1e-12; }

  // Inclusive membership with a small slack so that angles computed by
  // trigonometry still land on the endpoints.
  bool contains(double theta) const {
    return theta >= theta1_ - 1e-12 && theta <= theta2_ + 1e-12;
  }

 private:
  double theta1_;
  double theta2_;
};

// Parallel-beam acquisition grid: uniformly spaced projection angles in
// [0, pi) and a centered detector of n_det bins with constant pitch. The
// detector must cover the diagonal of the [-1,1]^2 support so that no object
// inside the unit square is truncated.
class Geometry {
 public:
  Geometry(std::vector<double> angles, int n_det, double pitch);

  // n_angles views at theta_j = j*pi/n_angles, detector spanning
  // [-half_extent, half_extent].
  static Geometry parallel(int n_angles, int n_det, double half_extent = 1.5);

  int n_angles() const { return static_cast<int>(angles_.size()); }
  int n_det() const { return n_det_; }
  double pitch() const { return pitch_; }
  double half_extent() const { return 0.5 * n_det_ * pitch_; }

  double angle(int j) const { return angles_[j]; }
  const std::vector<double>& angles() const { return angles_; }
  double angle_step() const;

  // World coordinate of the center of detector bin k.
  double s_of(int k) const { return (k + 0.5) * pitch_ - half_extent(); }

 private:
  std::vector<double> angles_;
  int n_det_;
  double pitch_;
};

// Reference clinical scanner values, kept for documentation of where default
// magnitudes come from. The toolkit models parallel-beam acquisition only, so
// these fan-beam distances are never used in computation.
struct FanBeamScannerDoc {
  static constexpr double source_detector_cm = 60.0;
  static constexpr double source_orbit_cm = 40.0;
  static constexpr int detector_units = 720;
  static constexpr double detector_width_cm = 41.3;
};

// Projection data on a Geometry, indexed (angle, detector bin).
class Sinogram {
 public:
  Sinogram() = default;
  explicit Sinogram(Geometry geom, double fill = 0.0);

  const Geometry& geometry() const { return geom_; }
  double& at(int angle, int det) {
    return values_[static_cast<std::size_t>(angle) * geom_.n_det() + det];
  }
  double at(int angle, int det) const {
    return values_[static_cast<std::size_t>(angle) * geom_.n_det() + det];
  }
  double* row(int angle) {
    return values_.data() + static_cast<std::size_t>(angle) * geom_.n_det();
  }
  const double* row(int angle) const {
    return values_.data() + static_cast<std::size_t>(angle) * geom_.n_det();
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Geometry geom_{std::vector<double>{0.0}, 2, 2.0};
  std::vector<double> values_;
};

// Ramp-filtered projection data. A separate type so a raw sinogram cannot be
// backprojected where filtered rows are expected by mistake.
class FilteredSinogram {
 public:
  FilteredSinogram() = default;
  explicit FilteredSinogram(Geometry geom, double fill = 0.0);

  const Geometry& geometry() const { return geom_; }
  double& at(int angle, int det) {
    return values_[static_cast<std::size_t>(angle) * geom_.n_det() + det];
  }
  double at(int angle, int det) const {
    return values_[static_cast<std::size_t>(angle) * geom_.n_det() + det];
  }
  double* row(int angle) {
    return values_.data() + static_cast<std::size_t>(angle) * geom_.n_det();
  }
  const double* row(int angle) const {
    return values_.data() + static_cast<std::size_t>(angle) * geom_.n_det();
  }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  Geometry geom_{std::vector<double>{0.0}, 2, 2.0};
  std::vector<double> values_;
};

}  // namespace lact
