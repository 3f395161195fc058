#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"
#include "lact/io.hpp"
#include "lact/phantom.hpp"
#include "lact/projector.hpp"
#include "lact/visibility.hpp"
#include "util.hpp"

using namespace lact;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("LACT_CLI");
  REQUIRE(cli != nullptr);
  const std::string cmd = std::string(cli) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json read_json(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  nlohmann::json j;
  f >> j;
  return j;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p);
  f << text;
}

}  // namespace

TEST_CASE("image raw round trip with float quantization") {
  const fs::path dir = fresh_dir("lact_io_image");
  const Image img = testutil::smooth_image(110, 24);
  io::save_image(img, dir / "a.raw", false);
  const Image back = io::load_image(dir / "a.raw");
  REQUIRE(back.side() == img.side());
  for (std::size_t i = 0; i < img.values().size(); ++i)
    CHECK(back.values()[i] ==
          static_cast<double>(static_cast<float>(img.values()[i])));
  // A second generation is exact.
  io::save_image(back, dir / "b.raw", false);
  CHECK(io::load_image(dir / "b.raw").values() == back.values());
}

TEST_CASE("sinogram raw and csv round trips") {
  const fs::path dir = fresh_dir("lact_io_sino");
  const Geometry g = Geometry::parallel(9, 17);
  const Sinogram sino = testutil::smooth_sinogram(111, g);

  io::save_sinogram_raw(sino, dir / "s.raw");
  const Sinogram raw_back = io::load_sinogram_raw(dir / "s.raw");
  CHECK(raw_back.geometry().angles() == g.angles());
  CHECK(raw_back.geometry().pitch() == g.pitch());
  for (std::size_t i = 0; i < sino.values().size(); ++i)
    CHECK(raw_back.values()[i] ==
          static_cast<double>(static_cast<float>(sino.values()[i])));

  // CSV carries full doubles, so this one is lossless in one generation.
  io::save_sinogram_csv(sino, dir / "s.csv");
  const Sinogram csv_back = io::load_sinogram_csv(dir / "s.csv");
  CHECK(csv_back.geometry().angles() == g.angles());
  CHECK(csv_back.values() == sino.values());

  std::ifstream csv(dir / "s.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header.rfind("angle_deg,det_0,", 0) == 0);
}

TEST_CASE("filtered sinogram type tag is enforced") {
  const fs::path dir = fresh_dir("lact_io_filtered");
  const Geometry g = Geometry::parallel(4, 12);
  FilteredSinogram filt(g);
  for (std::size_t i = 0; i < filt.values().size(); ++i)
    filt.values()[i] = 0.25 * static_cast<double>(i);
  io::save_filtered_raw(filt, dir / "f.raw");
  CHECK(io::load_filtered_raw(dir / "f.raw").values().size() ==
        filt.values().size());
  // A plain sinogram loader must refuse the filtered artifact.
  CHECK_THROWS_AS(io::load_sinogram_raw(dir / "f.raw"), io::FormatError);
}

TEST_CASE("tensor round trip") {
  const fs::path dir = fresh_dir("lact_io_tensor");
  FeatureTensor t(3, 4, 5);
  SplitMix64 rng(112);
  for (double& v : t.values()) v = rng.uniform(-2.0, 2.0);
  io::save_tensor(t, dir / "t.raw");
  const FeatureTensor back = io::load_tensor(dir / "t.raw");
  REQUIRE(back.channels() == 3);
  REQUIRE(back.height() == 4);
  REQUIRE(back.width() == 5);
  for (std::size_t i = 0; i < t.values().size(); ++i)
    CHECK(back.values()[i] ==
          static_cast<double>(static_cast<float>(t.values()[i])));
}

TEST_CASE("weight map files are validated on load") {
  const fs::path dir = fresh_dir("lact_io_weights");
  Image grid(6, 1.0);
  grid.at(2, 3) = 2.0;
  io::save_weight_map(WeightMap(std::move(grid)), dir / "w.raw");
  const WeightMap back = io::load_weight_map(dir / "w.raw");
  CHECK(back.at(2, 3) == 2.0);
  CHECK(back.at(0, 0) == 1.0);

  // Corrupt one value in the raw payload; the loader must reject it.
  std::fstream f(dir / "w.raw",
                 std::ios::binary | std::ios::in | std::ios::out);
  const float bad = 3.0f;
  f.write(reinterpret_cast<const char*>(&bad), sizeof(bad));
  f.close();
  CHECK_THROWS_AS(io::load_weight_map(dir / "w.raw"), io::FormatError);
}

TEST_CASE("phantom and artifact line json round trips are exact") {
  const fs::path dir = fresh_dir("lact_io_json");
  EllipsePhantom p;
  p.add(Ellipse(0.123456789, -0.4, 0.321, 0.2, 1.01234567890123, 0.7));
  p.add(Ellipse(-0.2, 0.05, 0.5, 0.45, 0.0, -0.3));
  io::save_phantom_json(p, dir / "p.json");
  const EllipsePhantom back = io::load_phantom_json(dir / "p.json");
  REQUIRE(back.ellipses().size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(back.ellipses()[i].cx == p.ellipses()[i].cx);
    CHECK(back.ellipses()[i].cy == p.ellipses()[i].cy);
    CHECK(back.ellipses()[i].a == p.ellipses()[i].a);
    CHECK(back.ellipses()[i].b == p.ellipses()[i].b);
    CHECK(back.ellipses()[i].tilt == p.ellipses()[i].tilt);
    CHECK(back.ellipses()[i].intensity == p.ellipses()[i].intensity);
  }

  const std::vector<ArtifactLine> lines = {{0.7853981633974483, 0.25},
                                           {2.0943951023931953, -0.125}};
  io::save_artifact_lines(lines, dir / "l.json");
  const auto lines_back = io::load_artifact_lines(dir / "l.json");
  REQUIRE(lines_back.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(lines_back[i].theta == lines[i].theta);
    CHECK(lines_back[i].s == lines[i].s);
  }
}

TEST_CASE("loader failure modes are distinguishable") {
  const fs::path dir = fresh_dir("lact_io_errors");
  CHECK_THROWS_AS(io::load_image(dir / "absent.raw"), io::IoError);

  const Image img = testutil::smooth_image(113, 8);
  io::save_image(img, dir / "x.raw", false);

  // Wrong kind.
  auto j = read_json(dir / "x.json");
  j["kind"] = "tensor";
  write_text(dir / "x.json", j.dump());
  CHECK_THROWS_AS(io::load_image(dir / "x.raw"), io::FormatError);

  // Wrong endianness tag.
  j["kind"] = "image";
  j["endianness"] = "big";
  write_text(dir / "x.json", j.dump());
  CHECK_THROWS_AS(io::load_image(dir / "x.raw"), io::FormatError);

  // Truncated payload.
  io::save_image(img, dir / "y.raw", false);
  fs::resize_file(dir / "y.raw", 17);
  CHECK_THROWS_AS(io::load_image(dir / "y.raw"), io::FormatError);

  // Unreadable sidecar JSON.
  io::save_image(img, dir / "z.raw", false);
  write_text(dir / "z.json", "{broken");
  CHECK_THROWS_AS(io::load_image(dir / "z.raw"), io::FormatError);
}

TEST_CASE("pgm preview window and byte order") {
  const fs::path dir = fresh_dir("lact_io_pgm");
  Image img(4, 0.0);
  img.at(0, 0) = -1.0;
  img.at(3, 3) = 3.0;
  io::save_pgm16(img, dir / "p.pgm", -1.0, 3.0);

  std::ifstream f(dir / "p.pgm", std::ios::binary);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  f >> magic >> w >> h >> maxval;
  CHECK(magic == "P5");
  CHECK(w == 4);
  CHECK(h == 4);
  CHECK(maxval == 65535);
  f.get();
  std::vector<unsigned char> bytes(4 * 4 * 2);
  f.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  REQUIRE(f.good());
  auto px = [&](int i, int j) {
    const std::size_t off = 2 * (static_cast<std::size_t>(i) * 4 + j);
    return 256 * bytes[off] + bytes[off + 1];
  };
  // Rows are written top to bottom, so row 0 of the file is the top of the
  // image (largest y), which is image row 3.
  CHECK(px(0, 3) == 65535);
  CHECK(px(3, 0) == 0);
  CHECK(px(1, 1) == 16384);
}

TEST_CASE("cli pipeline, artifacts, determinism and exit codes") {
  const fs::path base = fresh_dir("lact_cli");
  const fs::path cfg = base / "cfg.json";
  write_text(cfg, R"({
    "phantom": "shepp-logan",
    "image_size": 64,
    "geometry": {"n_angles": 90, "n_det": 96, "half_extent": 1.5},
    "range_deg": [0, 120],
    "block": {"channels": 4, "patch": 8, "seed": 21},
    "tau_rel": 0.1
  })");

  auto run_all = [&](const fs::path& out, const std::string& extra) {
    for (const char* verb :
         {"phantom", "project", "filter", "recon", "visibility", "weights",
          "block-demo", "loss", "metrics"}) {
      const int code = run_cli(std::string(verb) + " --config " + cfg.string() +
                               " --out " + out.string() + extra);
      REQUIRE(code == 0);
    }
  };
  run_all(base / "run1", "");
  run_all(base / "run2", "");

  const std::set<std::string> expected = {
      "phantom.raw",  "phantom.json",  "phantom.pgm",   "sinogram.raw",
      "sinogram.json", "sinogram.csv", "sinogram.csv.json", "filtered.raw",
      "filtered.json", "recon.raw",    "recon.json",    "recon.pgm",
      "visibility.json", "artifact_lines.json", "weights.raw", "weights.json",
      "d1.raw",       "d1.json",       "block.raw",     "block.json",
      "block.pgm",    "loss.json",     "metrics.json"};
  std::set<std::string> produced;
  for (const auto& entry : fs::directory_iterator(base / "run1"))
    produced.insert(entry.path().filename().string());
  CHECK(produced == expected);

  for (const std::string& name : expected)
    CHECK(testutil::same_bytes((base / "run1" / name).string(),
                               (base / "run2" / name).string()));

  // Thread count must not leak into the artifacts.
  run_all(base / "run_t2", " --threads 2");
  for (const std::string& name : expected)
    CHECK(testutil::same_bytes((base / "run1" / name).string(),
                               (base / "run_t2" / name).string()));

  // Metrics content is consistent with its own loss report.
  const auto metrics = read_json(base / "run1" / "metrics.json");
  CHECK(metrics.at("ssim").get<double>() ==
        doctest::Approx(1.0 - metrics.at("l_s").get<double>()));
  CHECK(metrics.at("psnr_capped").get<bool>() == false);
  const auto loss = read_json(base / "run1" / "loss.json");
  for (const char* key : {"l_p", "l_s", "l_e", "l_a", "total"})
    CHECK(loss.at(key).get<double>() == metrics.at(key).get<double>());
}

TEST_CASE("cli full range equals explicit 0 to 180") {
  const fs::path base = fresh_dir("lact_cli_range");
  const fs::path cfg = base / "cfg.json";
  write_text(cfg, R"({
    "phantom": "disk",
    "image_size": 48,
    "geometry": {"n_angles": 60, "n_det": 72, "half_extent": 1.5}
  })");
  const std::string common =
      " --config " + cfg.string() + " --out " + base.string();
  REQUIRE(run_cli("phantom" + common) == 0);
  REQUIRE(run_cli("project" + common) == 0);
  REQUIRE(run_cli("recon" + common) == 0);
  fs::copy_file(base / "recon.raw", base / "recon_full.raw");
  REQUIRE(run_cli("recon" + common + " --range-deg 0 180") == 0);
  CHECK(testutil::same_bytes((base / "recon.raw").string(),
                             (base / "recon_full.raw").string()));
}

TEST_CASE("cli distinguishes failure classes by exit code") {
  const fs::path base = fresh_dir("lact_cli_errors");
  const fs::path cfg = base / "cfg.json";
  write_text(cfg, R"({"phantom": "disk", "image_size": 32,
                      "geometry": {"n_angles": 30, "n_det": 48}})");
  const std::string common =
      " --config " + cfg.string() + " --out " + base.string();

  // Missing upstream artifact.
  CHECK(run_cli("recon" + common) == 3);

  // Malformed config file.
  write_text(base / "broken.json", "{nope");
  CHECK(run_cli("phantom --config " + (base / "broken.json").string() +
                " --out " + base.string()) == 4);

  // Unknown configuration key.
  write_text(base / "unknown.json", R"({"imagesize": 32})");
  CHECK(run_cli("phantom --config " + (base / "unknown.json").string() +
                " --out " + base.string()) == 2);

  // Range violations.
  REQUIRE(run_cli("phantom" + common) == 0);
  REQUIRE(run_cli("project" + common) == 0);
  CHECK(run_cli("recon" + common + " --range-deg 120 30") == 5);
  CHECK(run_cli("recon" + common + " --range-deg 0 200") == 5);
  CHECK(run_cli("recon" + common + " --range-deg 0.001 0.002") == 5);

  // Usage errors.
  CHECK(run_cli("no-such-verb") == 2);
  CHECK(run_cli("recon --no-such-flag" + common) == 2);
  CHECK(run_cli("--help") == 0);

  // A destroyed sidecar is a format error, not a missing input.
  write_text(base / "sinogram.json", R"({"kind": "image"})");
  CHECK(run_cli("recon" + common) == 4);
}

TEST_CASE("cli honors the output directory environment variable") {
  const fs::path base = fresh_dir("lact_cli_env");
  const fs::path cfg = base / "cfg.json";
  write_text(cfg, R"({"phantom": "disk", "image_size": 32,
                      "geometry": {"n_angles": 30, "n_det": 48}})");
  const fs::path envdir = base / "from_env";
  setenv("LACT_OUT_DIR", envdir.string().c_str(), 1);
  const int code = run_cli("phantom --config " + cfg.string());
  unsetenv("LACT_OUT_DIR");
  REQUIRE(code == 0);
  CHECK(fs::exists(envdir / "phantom.raw"));
}
