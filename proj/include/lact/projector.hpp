#pragma once

#include "lact/geometry.hpp"
#include "lact/image.hpp"

namespace lact {

// Ray-driven parallel-beam projection. Each ray is sampled at uniform
// arc-length step (default: half the pixel width) with bilinear
// interpolation, and the line integral is step * sum(samples). Rays that
// miss the image support yield exactly zero.
Sinogram forward_project(const Image& img, const Geometry& geom, double step);
Sinogram forward_project(const Image& img, const Geometry& geom);

// Pixel-driven backprojection restricted to the angles of the geometry that
// fall inside `range` (inclusive). For each pixel the detector trace is read
// with linear interpolation between bins and the sum is scaled by the angular
// spacing, approximating the integral over the view angle.
Image back_project(const Sinogram& sino, const AngularRange& range, int side);
Image back_project(const FilteredSinogram& sino, const AngularRange& range,
                   int side);

}  // namespace lact
