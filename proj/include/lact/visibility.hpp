#pragma once

#include <vector>

#include "lact/geometry.hpp"
#include "lact/image.hpp"
#include "lact/phantom.hpp"

namespace lact {

enum class VisibilityLabel { kVisible, kInvisible };

// Point on an ellipse boundary together with the unit normal direction of the
// boundary there. The normal is stored as the mod-pi representative with
// ny > 0 (or nx > 0 when ny = 0), since a direction and its negation label
// the same singularity.
struct BoundarySample {
  double x, y;
  double nx, ny;
};

// Line written by its normal form x*cos(theta) + y*sin(theta) = s.
struct ArtifactLine {
  double theta;
  double s;
};

// A boundary direction is stably recoverable exactly when some measured view
// is tangent to it, i.e. when the normal angle (mod pi) falls inside the
// scanned range, endpoints included.
VisibilityLabel classify_singularity(double nx, double ny,
                                     const AngularRange& range);

// m samples uniform in the parametric angle of the ellipse.
std::vector<BoundarySample> ellipse_boundary_samples(const Ellipse& e, int m);

// Residuals of a limited-angle reconstruction concentrate along lines tangent
// to the object whose normals sit at the two range endpoints. Per ellipse and
// endpoint there are two such tangents, so 4 lines per ellipse.
std::vector<ArtifactLine> predicted_artifact_lines(const EllipsePhantom& phantom,
                                                   const AngularRange& range);

// Pixelwise loss weights over an image grid: 2 on invisible edges, 1 on
// visible edges and on smooth pixels.
class WeightMap {
 public:
  explicit WeightMap(Image grid);

  int side() const { return grid_.side(); }
  double at(int row, int col) const { return grid_.at(row, col); }
  const Image& grid() const { return grid_; }

 private:
  Image grid_;
};

// Gradient gate below which a pixel counts as smooth: 10% of the largest
// Sobel magnitude of the reference (floored away from zero so constant
// references stay valid).
double default_gradient_threshold(const Image& reference);

WeightMap weight_map(const Image& reference, const AngularRange& range,
                     double tau);
WeightMap weight_map(const Image& reference, const AngularRange& range);

}  // namespace lact
