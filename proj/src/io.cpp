#include "lact/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

static_assert(std::endian::native == std::endian::little,
              "raw artifacts are defined little-endian");

namespace lact::io {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json_file(const fs::path& p, const char* what) {
  std::ifstream f(p);
  if (!f) throw IoError(std::string(what) + ": missing file " + p.string());
  try {
    json j;
    f >> j;
    return j;
  } catch (const json::exception& e) {
    throw FormatError(std::string(what) + ": bad JSON in " + p.string() +
                      ": " + e.what());
  }
}

void write_json_file(const json& j, const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw IoError("cannot open for writing: " + p.string());
  f << j.dump(2) << '\n';
  if (!f) throw IoError("write failed: " + p.string());
}

void write_floats(const std::vector<double>& vals, const fs::path& p) {
  std::vector<float> buf(vals.size());
  for (std::size_t i = 0; i < vals.size(); ++i)
    buf[i] = static_cast<float>(vals[i]);
  std::ofstream f(p, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + p.string());
  f.write(reinterpret_cast<const char*>(buf.data()),
          static_cast<std::streamsize>(buf.size() * sizeof(float)));
  if (!f) throw IoError("write failed: " + p.string());
}

std::vector<double> read_floats(const fs::path& p, std::size_t expected,
                                const char* what) {
  std::ifstream f(p, std::ios::binary);
  if (!f) throw IoError(std::string(what) + ": missing file " + p.string());
  f.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(f.tellg());
  if (bytes != expected * sizeof(float))
    throw FormatError(std::string(what) + ": " + p.string() +
                      " has wrong size for its sidecar");
  f.seekg(0);
  std::vector<float> buf(expected);
  f.read(reinterpret_cast<char*>(buf.data()),
         static_cast<std::streamsize>(bytes));
  if (!f) throw FormatError(std::string(what) + ": short read " + p.string());
  return std::vector<double>(buf.begin(), buf.end());
}

json base_sidecar(const char* kind) {
  return json{{"kind", kind},
              {"dtype", "float32"},
              {"endianness", "little"},
              {"layout", "row-major"}};
}

void check_base(const json& j, const char* kind, const fs::path& p) {
  if (j.value("kind", "") != kind || j.value("dtype", "") != "float32" ||
      j.value("endianness", "") != "little" ||
      j.value("layout", "") != "row-major")
    throw FormatError(std::string("sidecar ") + p.string() +
                      " does not describe a " + kind + " artifact");
}

json geometry_json(const Geometry& g) {
  return json{{"n_angles", g.n_angles()},
              {"n_det", g.n_det()},
              {"pitch", g.pitch()},
              {"angles_rad", g.angles()}};
}

Geometry geometry_from_json(const json& j, const fs::path& p) {
  try {
    std::vector<double> angles = j.at("angles_rad").get<std::vector<double>>();
    const int n_det = j.at("n_det").get<int>();
    const double pitch = j.at("pitch").get<double>();
    if (static_cast<int>(angles.size()) != j.at("n_angles").get<int>())
      throw FormatError("sidecar " + p.string() + ": angle count mismatch");
    return Geometry(std::move(angles), n_det, pitch);
  } catch (const json::exception& e) {
    throw FormatError("sidecar " + p.string() + ": " + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError("sidecar " + p.string() + ": " + e.what());
  }
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// CSV sidecars append .json so they never collide with the sidecar of a
// .raw artifact sharing the same stem.
fs::path csv_sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  p += ".json";
  return p;
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& raw) {
  fs::path p = raw;
  p.replace_extension(".json");
  return p;
}

void save_image(const Image& img, const std::filesystem::path& raw,
                bool pgm_preview) {
  write_floats(img.values(), raw);
  json j = base_sidecar("image");
  j["width"] = img.side();
  j["height"] = img.side();
  if (pgm_preview) {
    double lo = img.values()[0], hi = img.values()[0];
    for (const double v : img.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    fs::path pgm = raw;
    pgm.replace_extension(".pgm");
    save_pgm16(img, pgm, lo, hi);
    j["preview"] = {{"path", pgm.filename().string()}, {"min", lo}, {"max", hi}};
  }
  write_json_file(j, sidecar_path(raw));
}

Image load_image(const std::filesystem::path& raw) {
  const json j = read_json_file(sidecar_path(raw), "load_image");
  check_base(j, "image", sidecar_path(raw));
  const int w = j.value("width", 0), h = j.value("height", 0);
  if (w < 2 || h != w)
    throw FormatError("load_image: bad dimensions in sidecar for " +
                      raw.string());
  Image img(w);
  img.values() = read_floats(raw, static_cast<std::size_t>(w) * h, "load_image");
  return img;
}

void save_sinogram_raw(const Sinogram& sino, const std::filesystem::path& raw) {
  write_floats(sino.values(), raw);
  json j = base_sidecar("sinogram");
  j.update(geometry_json(sino.geometry()));
  write_json_file(j, sidecar_path(raw));
}

Sinogram load_sinogram_raw(const std::filesystem::path& raw) {
  const json j = read_json_file(sidecar_path(raw), "load_sinogram");
  check_base(j, "sinogram", sidecar_path(raw));
  Geometry geom = geometry_from_json(j, sidecar_path(raw));
  Sinogram sino(geom);
  sino.values() = read_floats(
      raw, static_cast<std::size_t>(geom.n_angles()) * geom.n_det(),
      "load_sinogram");
  return sino;
}

void save_sinogram_csv(const Sinogram& sino, const std::filesystem::path& csv) {
  std::ofstream f(csv);
  if (!f) throw IoError("cannot open for writing: " + csv.string());
  const Geometry& g = sino.geometry();
  f << "angle_deg";
  for (int k = 0; k < g.n_det(); ++k) f << ",det_" << k;
  f << '\n';
  for (int j = 0; j < g.n_angles(); ++j) {
    f << format_double(g.angle(j) * 180.0 / kPi);
    for (int k = 0; k < g.n_det(); ++k) f << ',' << format_double(sino.at(j, k));
    f << '\n';
  }
  if (!f) throw IoError("write failed: " + csv.string());
  json meta = base_sidecar("sinogram");
  meta["dtype"] = "float64-csv";
  meta.update(geometry_json(g));
  write_json_file(meta, csv_sidecar_path(csv));
}

Sinogram load_sinogram_csv(const std::filesystem::path& csv) {
  const fs::path side = csv_sidecar_path(csv);
  const json j = read_json_file(side, "load_sinogram_csv");
  if (j.value("kind", "") != "sinogram")
    throw FormatError("sidecar " + side.string() +
                      " does not describe a sinogram");
  Geometry geom = geometry_from_json(j, side);
  std::ifstream f(csv);
  if (!f) throw IoError("load_sinogram_csv: missing file " + csv.string());
  std::string line;
  if (!std::getline(f, line) || line.rfind("angle_deg", 0) != 0)
    throw FormatError("load_sinogram_csv: missing header in " + csv.string());
  Sinogram sino(geom);
  for (int row = 0; row < geom.n_angles(); ++row) {
    if (!std::getline(f, line))
      throw FormatError("load_sinogram_csv: truncated " + csv.string());
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ','))
      throw FormatError("load_sinogram_csv: empty row in " + csv.string());
    for (int k = 0; k < geom.n_det(); ++k) {
      if (!std::getline(ss, cell, ','))
        throw FormatError("load_sinogram_csv: short row in " + csv.string());
      try {
        sino.at(row, k) = std::stod(cell);
      } catch (const std::exception&) {
        throw FormatError("load_sinogram_csv: bad number '" + cell + "' in " +
                          csv.string());
      }
    }
  }
  return sino;
}

void save_filtered_raw(const FilteredSinogram& sino,
                       const std::filesystem::path& raw) {
  write_floats(sino.values(), raw);
  json j = base_sidecar("filtered-sinogram");
  j.update(geometry_json(sino.geometry()));
  write_json_file(j, sidecar_path(raw));
}

FilteredSinogram load_filtered_raw(const std::filesystem::path& raw) {
  const json j = read_json_file(sidecar_path(raw), "load_filtered");
  check_base(j, "filtered-sinogram", sidecar_path(raw));
  Geometry geom = geometry_from_json(j, sidecar_path(raw));
  FilteredSinogram sino(geom);
  sino.values() = read_floats(
      raw, static_cast<std::size_t>(geom.n_angles()) * geom.n_det(),
      "load_filtered");
  return sino;
}

void save_tensor(const FeatureTensor& t, const std::filesystem::path& raw) {
  write_floats(t.values(), raw);
  json j = base_sidecar("tensor");
  j["channels"] = t.channels();
  j["height"] = t.height();
  j["width"] = t.width();
  write_json_file(j, sidecar_path(raw));
}

FeatureTensor load_tensor(const std::filesystem::path& raw) {
  const json j = read_json_file(sidecar_path(raw), "load_tensor");
  check_base(j, "tensor", sidecar_path(raw));
  const int c = j.value("channels", 0), h = j.value("height", 0),
            w = j.value("width", 0);
  if (c < 1 || h < 1 || w < 1)
    throw FormatError("load_tensor: bad shape in sidecar for " + raw.string());
  FeatureTensor t(c, h, w);
  t.values() = read_floats(
      raw, static_cast<std::size_t>(c) * h * w, "load_tensor");
  return t;
}

void save_weight_map(const WeightMap& w, const std::filesystem::path& raw) {
  write_floats(w.grid().values(), raw);
  json j = base_sidecar("weight-map");
  j["width"] = w.side();
  j["height"] = w.side();
  write_json_file(j, sidecar_path(raw));
}

WeightMap load_weight_map(const std::filesystem::path& raw) {
  const json j = read_json_file(sidecar_path(raw), "load_weight_map");
  check_base(j, "weight-map", sidecar_path(raw));
  const int w = j.value("width", 0), h = j.value("height", 0);
  if (w < 2 || h != w)
    throw FormatError("load_weight_map: bad dimensions for " + raw.string());
  Image grid(w);
  grid.values() =
      read_floats(raw, static_cast<std::size_t>(w) * h, "load_weight_map");
  try {
    return WeightMap(std::move(grid));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("load_weight_map: ") + e.what());
  }
}

EllipsePhantom load_phantom_json(const std::filesystem::path& file) {
  const json j = read_json_file(file, "load_phantom");
  if (!j.is_array())
    throw FormatError("load_phantom: " + file.string() +
                      " must be a JSON array of ellipses");
  EllipsePhantom phantom;
  for (const json& e : j) {
    try {
      const auto center = e.at("center").get<std::array<double, 2>>();
      const auto axes = e.at("axes").get<std::array<double, 2>>();
      const double tilt = e.contains("tilt_rad")
                              ? e.at("tilt_rad").get<double>()
                              : e.at("tilt_deg").get<double>() * kPi / 180.0;
      const double intensity = e.at("intensity").get<double>();
      phantom.add(Ellipse(center[0], center[1], axes[0], axes[1], tilt,
                          intensity));
    } catch (const json::exception& ex) {
      throw FormatError("load_phantom: bad ellipse entry in " + file.string() +
                        ": " + ex.what());
    } catch (const std::invalid_argument& ex) {
      throw FormatError("load_phantom: invalid ellipse in " + file.string() +
                        ": " + ex.what());
    }
  }
  return phantom;
}

void save_phantom_json(const EllipsePhantom& phantom,
                       const std::filesystem::path& file) {
  json j = json::array();
  for (const Ellipse& e : phantom.ellipses()) {
    j.push_back(json{{"center", {e.cx, e.cy}},
                     {"axes", {e.a, e.b}},
                     {"tilt_deg", e.tilt * 180.0 / kPi},
                     {"tilt_rad", e.tilt},
                     {"intensity", e.intensity}});
  }
  write_json_file(j, file);
}

void save_artifact_lines(const std::vector<ArtifactLine>& lines,
                         const std::filesystem::path& file) {
  json j = json::array();
  for (const ArtifactLine& l : lines)
    j.push_back(json{{"theta_deg", l.theta * 180.0 / kPi},
                     {"theta_rad", l.theta},
                     {"s", l.s}});
  write_json_file(j, file);
}

std::vector<ArtifactLine> load_artifact_lines(
    const std::filesystem::path& file) {
  const json j = read_json_file(file, "load_artifact_lines");
  if (!j.is_array())
    throw FormatError("load_artifact_lines: " + file.string() +
                      " must be a JSON array");
  std::vector<ArtifactLine> lines;
  for (const json& e : j) {
    try {
      const double theta = e.contains("theta_rad")
                               ? e.at("theta_rad").get<double>()
                               : e.at("theta_deg").get<double>() * kPi / 180.0;
      lines.push_back(ArtifactLine{theta, e.at("s").get<double>()});
    } catch (const json::exception& ex) {
      throw FormatError("load_artifact_lines: bad entry in " + file.string() +
                        ": " + ex.what());
    }
  }
  return lines;
}

void save_pgm16(const Image& img, const std::filesystem::path& pgm, double lo,
                double hi) {
  std::ofstream f(pgm, std::ios::binary);
  if (!f) throw IoError("cannot open for writing: " + pgm.string());
  const int n = img.side();
  f << "P5\n" << n << ' ' << n << "\n65535\n";
  const double span = hi - lo;
  std::vector<unsigned char> row(static_cast<std::size_t>(n) * 2);
  // Grid rows index y upward, PGM rows run top to bottom.
  for (int i = n - 1; i >= 0; --i) {
    for (int j = 0; j < n; ++j) {
      double t = span > 0.0 ? (img.at(i, j) - lo) / span : 0.0;
      t = std::clamp(t, 0.0, 1.0);
      const auto v = static_cast<std::uint16_t>(std::lround(t * 65535.0));
      row[2 * j] = static_cast<unsigned char>(v >> 8);
      row[2 * j + 1] = static_cast<unsigned char>(v & 0xff);
    }
    f.write(reinterpret_cast<const char*>(row.data()),
            static_cast<std::streamsize>(row.size()));
  }
  if (!f) throw IoError("write failed: " + pgm.string());
}

}  // namespace lact::io
