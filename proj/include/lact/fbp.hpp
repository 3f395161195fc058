#pragma once

#include <vector>

#include "lact/geometry.hpp"
#include "lact/image.hpp"

namespace lact {

// Smallest power of two >= 2*n.
int ramlak_padded_length(int n);

// Ram-Lak filtering of one detector row. The row is shifted by its edge
// pedestal (mean of the two end bins, zero for any row whose object fits
// inside the detector), zero-padded, multiplied in the frequency domain by
// |freq| up to the Nyquist frequency and transformed back. No apodization
// window is applied. Returns the padded row of length ramlak_padded_length.
std::vector<double> ramlak_filter_row_padded(const std::vector<double>& row,
                                             double pitch);

// Same, truncated back to the original length.
std::vector<double> ramlak_filter_row(const std::vector<double>& row,
                                      double pitch);

// Applies the row filter to every angle of the sinogram.
FilteredSinogram ramlak_filter(const Sinogram& sino);

// Overall scale of the reconstruction. The cycles-per-unit frequency grid of
// the ramp filter together with the angular quadrature of the backprojector
// already reproduces unit contrast, so no empirical factor is needed.
inline constexpr double kFbpScale = 1.0;

// Filtered backprojection over the full angle set onto a side x side image.
Image fbp_reconstruct(const Sinogram& sino, int side);

// Filtered backprojection restricted to the views inside `range`. The result
// is deliberately not renormalized by the missing angular fraction; a narrow
// range dims and distorts the image instead of hiding that data is missing.
Image limited_fbp(const Sinogram& sino, const AngularRange& range, int side);

}  // namespace lact
