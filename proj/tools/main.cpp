#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lact/blocks.hpp"
#include "lact/fbp.hpp"
#include "lact/io.hpp"
#include "lact/losses.hpp"
#include "lact/parallel.hpp"
#include "lact/phantom.hpp"
#include "lact/projector.hpp"
#include "lact/visibility.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,         // bad flags or invalid configuration values
  kMissingInput = 3,  // a referenced file does not exist
  kBadFormat = 4,     // a file exists but cannot be understood
  kBadRange = 5,      // angular range invalid or selects no data
};

struct RangeViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string phantom = "shepp-logan";
  int image_size = 256;
  int n_angles = 720;
  int n_det = 384;
  double half_extent = 1.5;
  std::optional<std::pair<double, double>> range_deg;
  double data_range = 1.0;
  double tau_rel = 0.1;
  lact::BlockConfig block;
  lact::LossWeights weights;
  std::string out_dir;
};

double get_num(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw lact::io::FormatError(std::string("config: ") + key +
                                " must be a number");
  return j.at(key).get<double>();
}

RunConfig load_config(const std::string& path) {
  RunConfig cfg;
  if (path.empty()) return cfg;
  std::ifstream f(path);
  if (!f) throw lact::io::IoError("config file not found: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw lact::io::FormatError("config: bad JSON in " + path + ": " +
                                e.what());
  }
  if (!j.is_object())
    throw lact::io::FormatError("config: top level must be an object");

  static const char* known[] = {"phantom",    "image_size", "geometry",
                                "range_deg",  "data_range", "tau_rel",
                                "block",      "loss_weights", "out_dir"};
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok)
      throw std::invalid_argument("config: unknown key '" + key + "'");
  }

  cfg.phantom = j.value("phantom", cfg.phantom);
  cfg.image_size = static_cast<int>(get_num(j, "image_size", cfg.image_size));
  if (j.contains("geometry")) {
    const json& g = j.at("geometry");
    cfg.n_angles = static_cast<int>(get_num(g, "n_angles", cfg.n_angles));
    cfg.n_det = static_cast<int>(get_num(g, "n_det", cfg.n_det));
    cfg.half_extent = get_num(g, "half_extent", cfg.half_extent);
  }
  if (j.contains("range_deg") && !j.at("range_deg").is_null()) {
    const json& r = j.at("range_deg");
    if (!r.is_array() || r.size() != 2)
      throw lact::io::FormatError("config: range_deg must be [start, stop]");
    cfg.range_deg = {r[0].get<double>(), r[1].get<double>()};
  }
  cfg.data_range = get_num(j, "data_range", cfg.data_range);
  cfg.tau_rel = get_num(j, "tau_rel", cfg.tau_rel);
  if (j.contains("block")) {
    const json& b = j.at("block");
    cfg.block.channels =
        static_cast<int>(get_num(b, "channels", cfg.block.channels));
    cfg.block.patch = static_cast<int>(get_num(b, "patch", cfg.block.patch));
    if (b.contains("seed")) cfg.block.seed = b.at("seed").get<std::uint64_t>();
  }
  if (j.contains("loss_weights")) {
    const json& w = j.at("loss_weights");
    cfg.weights.perceptual = get_num(w, "perceptual", cfg.weights.perceptual);
    cfg.weights.ssim = get_num(w, "ssim", cfg.weights.ssim);
    cfg.weights.edge = get_num(w, "edge", cfg.weights.edge);
    cfg.weights.anisotropic =
        get_num(w, "anisotropic", cfg.weights.anisotropic);
    cfg.weights.mu = get_num(w, "mu", cfg.weights.mu);
  }
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  if (cfg.image_size < 2 || cfg.n_angles < 2 || cfg.n_det < 2 ||
      !(cfg.half_extent > 0.0) || !(cfg.data_range > 0.0) ||
      !(cfg.tau_rel > 0.0) || cfg.block.channels < 1 || cfg.block.patch < 1)
    throw std::invalid_argument("config: value out of range");
  return cfg;
}

lact::EllipsePhantom resolve_phantom(const std::string& name) {
  if (name == "shepp-logan") return lact::phantoms::shepp_logan();
  if (name == "shepp-logan-original")
    return lact::phantoms::shepp_logan_original();
  if (name == "disk") return lact::phantoms::disk();
  return lact::io::load_phantom_json(name);
}

lact::AngularRange resolve_range(
    const std::optional<std::pair<double, double>>& deg) {
  if (!deg) return lact::AngularRange::full();
  try {
    return lact::AngularRange::from_degrees(deg->first, deg->second);
  } catch (const std::invalid_argument& e) {
    throw RangeViolation(e.what());
  }
}

void require_range_covers(const lact::Geometry& geom,
                          const lact::AngularRange& range) {
  for (int j = 0; j < geom.n_angles(); ++j)
    if (range.contains(geom.angle(j))) return;
  throw RangeViolation("range selects no projection angles");
}

struct Cli {
  std::string config_path;
  std::string out_override;
  std::vector<double> range_deg;
  std::uint64_t seed = 0;
  bool seed_given = false;
  unsigned threads = 0;

  RunConfig cfg;
  fs::path out;

  void finalize() {
    cfg = load_config(config_path);
    if (range_deg.size() == 2) cfg.range_deg = {range_deg[0], range_deg[1]};
    if (seed_given) cfg.block.seed = seed;
    lact::set_thread_count(threads);

    std::string dir = out_override;
    if (dir.empty()) dir = cfg.out_dir;
    if (dir.empty()) {
      if (const char* env = std::getenv("LACT_OUT_DIR")) dir = env;
    }
    if (dir.empty()) dir = ".";
    out = dir;
    fs::create_directories(out);
  }

  lact::Geometry geometry() const {
    return lact::Geometry::parallel(cfg.n_angles, cfg.n_det, cfg.half_extent);
  }

  double gradient_gate(const lact::Image& ref) const {
    const lact::Image mag = lact::sobel_magnitude(ref);
    double peak = 0.0;
    for (const double v : mag.values()) peak = std::max(peak, v);
    return std::max(cfg.tau_rel * peak, 1e-12);
  }
};

void cmd_phantom(const Cli& c) {
  const lact::Image img =
      lact::rasterize(resolve_phantom(c.cfg.phantom), c.cfg.image_size);
  lact::io::save_image(img, c.out / "phantom.raw", true);
}

void cmd_project(const Cli& c) {
  const lact::Image img = lact::io::load_image(c.out / "phantom.raw");
  const lact::Sinogram sino = lact::forward_project(img, c.geometry());
  lact::io::save_sinogram_raw(sino, c.out / "sinogram.raw");
  lact::io::save_sinogram_csv(sino, c.out / "sinogram.csv");
}

void cmd_filter(const Cli& c) {
  const lact::Sinogram sino =
      lact::io::load_sinogram_raw(c.out / "sinogram.raw");
  lact::io::save_filtered_raw(lact::ramlak_filter(sino),
                              c.out / "filtered.raw");
}

void cmd_recon(const Cli& c) {
  const lact::Sinogram sino =
      lact::io::load_sinogram_raw(c.out / "sinogram.raw");
  const lact::AngularRange range = resolve_range(c.cfg.range_deg);
  require_range_covers(sino.geometry(), range);
  const lact::Image img =
      lact::limited_fbp(sino, range, c.cfg.image_size);
  lact::io::save_image(img, c.out / "recon.raw", true);
}

void cmd_visibility(const Cli& c) {
  const lact::EllipsePhantom phantom = resolve_phantom(c.cfg.phantom);
  const lact::AngularRange range = resolve_range(c.cfg.range_deg);
  json report = json::array();
  for (std::size_t e = 0; e < phantom.ellipses().size(); ++e) {
    json samples = json::array();
    for (const lact::BoundarySample& s :
         lact::ellipse_boundary_samples(phantom.ellipses()[e], 360)) {
      const bool visible =
          lact::classify_singularity(s.nx, s.ny, range) ==
          lact::VisibilityLabel::kVisible;
      samples.push_back(json{{"x", s.x},
                             {"y", s.y},
                             {"nx", s.nx},
                             {"ny", s.ny},
                             {"visible", visible}});
    }
    report.push_back(json{{"ellipse", e}, {"samples", std::move(samples)}});
  }
  std::ofstream f(c.out / "visibility.json");
  if (!f)
    throw lact::io::IoError("cannot open for writing: " +
                            (c.out / "visibility.json").string());
  f << report.dump(2) << '\n';

  std::vector<lact::ArtifactLine> lines;
  if (range.is_limited())
    lines = lact::predicted_artifact_lines(phantom, range);
  lact::io::save_artifact_lines(lines, c.out / "artifact_lines.json");
}

void cmd_weights(const Cli& c) {
  const lact::Image ref = lact::io::load_image(c.out / "phantom.raw");
  const lact::AngularRange range = resolve_range(c.cfg.range_deg);
  const lact::WeightMap w =
      lact::weight_map(ref, range, c.gradient_gate(ref));
  lact::io::save_weight_map(w, c.out / "weights.raw");
}

void cmd_block_demo(const Cli& c) {
  const lact::Image img = lact::io::load_image(c.out / "phantom.raw");
  const lact::FeatureTensor d1 = lact::vswd_forward(img, c.cfg.block);
  lact::io::save_tensor(d1, c.out / "d1.raw");
  const lact::Image out_img = lact::umca_forward(d1, c.cfg.block);
  lact::io::save_image(out_img, c.out / "block.raw", true);
}

json loss_report(const Cli& c) {
  const lact::Image pred = lact::io::load_image(c.out / "recon.raw");
  const lact::Image truth = lact::io::load_image(c.out / "phantom.raw");
  const lact::AngularRange range = resolve_range(c.cfg.range_deg);
  const lact::WeightMap w =
      lact::weight_map(truth, range, c.gradient_gate(truth));
  const lact::FeatureExtractor fx =
      lact::FeatureExtractor::seeded(c.cfg.block.seed);

  const double l_p = lact::perceptual_loss(pred, truth, fx);
  const double l_s = lact::ssim_loss(pred, truth, 8, c.cfg.data_range);
  const double l_e = lact::edge_gradient_loss(pred, truth).value;
  const double l_a = lact::anisotropic_loss(pred, truth, w).value;
  return json{{"l_p", l_p},
              {"l_s", l_s},
              {"l_e", l_e},
              {"l_a", l_a},
              {"total", lact::combine_losses(c.cfg.weights, l_p, l_s, l_e, l_a)}};
}

void write_report(const json& j, const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw lact::io::IoError("cannot open for writing: " + p.string());
  f << j.dump(2) << '\n';
}

void cmd_loss(const Cli& c) { write_report(loss_report(c), c.out / "loss.json"); }

void cmd_metrics(const Cli& c) {
  const lact::Image pred = lact::io::load_image(c.out / "recon.raw");
  const lact::Image truth = lact::io::load_image(c.out / "phantom.raw");
  json report = loss_report(c);
  const lact::PsnrResult p = lact::psnr(pred, truth, c.cfg.data_range);
  report["psnr_db"] = p.capped ? json() : json(p.db);
  report["psnr_capped"] = p.capped;
  report["ssim"] = lact::ssim(pred, truth, 8, c.cfg.data_range);
  write_report(report, c.out / "metrics.json");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"limited-angle CT toolkit"};
  app.require_subcommand(1);

  Cli cli;
  struct Verb {
    const char* name;
    const char* help;
    void (*run)(const Cli&);
  };
  const Verb verbs[] = {
      {"phantom", "rasterize the configured phantom", cmd_phantom},
      {"project", "forward-project the phantom image", cmd_project},
      {"filter", "ramp-filter the sinogram", cmd_filter},
      {"recon", "filtered backprojection (optionally limited-angle)", cmd_recon},
      {"visibility", "label boundary normals against the scanned range",
       cmd_visibility},
      {"weights", "build the anisotropic loss weight map", cmd_weights},
      {"block-demo", "run the VSWD and UMCA forward blocks", cmd_block_demo},
      {"loss", "evaluate the four-term loss against the phantom", cmd_loss},
      {"metrics", "evaluate PSNR/SSIM and the loss report", cmd_metrics},
  };

  CLI::Option* seed_opt = nullptr;
  for (const Verb& v : verbs) {
    CLI::App* sc = app.add_subcommand(v.name, v.help);
    sc->add_option("--config", cli.config_path, "JSON run configuration");
    sc->add_option("--out", cli.out_override, "output directory");
    sc->add_option("--range-deg", cli.range_deg,
                   "angular range in degrees (start stop)")
        ->expected(2);
    seed_opt = sc->add_option("--seed", cli.seed, "parameter seed override");
    sc->add_option("--threads", cli.threads, "worker threads (0 = hardware)");
    sc->parse_complete_callback([&cli, &v, sc, seed_opt]() {
      (void)seed_opt;
      cli.seed_given = sc->count("--seed") > 0;
      cli.finalize();
      v.run(cli);
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  } catch (const RangeViolation& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadRange;
  } catch (const lact::io::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMissingInput;
  } catch (const lact::io::FormatError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBadFormat;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
