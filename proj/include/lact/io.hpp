#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "lact/geometry.hpp"
#include "lact/image.hpp"
#include "lact/phantom.hpp"
#include "lact/tensor.hpp"
#include "lact/visibility.hpp"

namespace lact::io {

// A referenced file is missing or unreadable.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A file exists but its contents or sidecar do not parse or do not match.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every raw artifact X.raw carries a JSON sidecar X.json describing dtype,
// layout and shape; loaders verify the sidecar before touching the payload.
std::filesystem::path sidecar_path(const std::filesystem::path& raw);

void save_image(const Image& img, const std::filesystem::path& raw,
                bool pgm_preview = false);
Image load_image(const std::filesystem::path& raw);

void save_sinogram_raw(const Sinogram& sino, const std::filesystem::path& raw);
Sinogram load_sinogram_raw(const std::filesystem::path& raw);

// CSV layout: header "angle_deg,det_0,...", then one row per angle. Geometry
// rides in the shared sidecar, values keep full double precision.
void save_sinogram_csv(const Sinogram& sino, const std::filesystem::path& csv);
Sinogram load_sinogram_csv(const std::filesystem::path& csv);

void save_filtered_raw(const FilteredSinogram& sino,
                       const std::filesystem::path& raw);
FilteredSinogram load_filtered_raw(const std::filesystem::path& raw);

void save_tensor(const FeatureTensor& t, const std::filesystem::path& raw);
FeatureTensor load_tensor(const std::filesystem::path& raw);

void save_weight_map(const WeightMap& w, const std::filesystem::path& raw);
WeightMap load_weight_map(const std::filesystem::path& raw);

// Phantom definition: JSON array of
// {center:[x,y], axes:[a,b], tilt_deg, intensity}.
EllipsePhantom load_phantom_json(const std::filesystem::path& file);
void save_phantom_json(const EllipsePhantom& phantom,
                       const std::filesystem::path& file);

void save_artifact_lines(const std::vector<ArtifactLine>& lines,
                         const std::filesystem::path& file);
std::vector<ArtifactLine> load_artifact_lines(const std::filesystem::path& file);

// 16-bit big-endian PGM scaled from the [lo, hi] window.
void save_pgm16(const Image& img, const std::filesystem::path& pgm, double lo,
                double hi);

}  // namespace lact::io
