// gcpreg: command-line front end for GCP matching, warp fitting and
// nearest-neighbour registration.

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include "gcpreg/io.hpp"
#include "gcpreg/overlay.hpp"
#include "gcpreg/pipeline.hpp"
#include "gcpreg/synth.hpp"

namespace fs = std::filesystem;
using namespace gcpreg;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitAlgorithm = 2;
constexpr std::size_t kMinMatches = 6;

struct MatchFlags {
  std::string preset = "vhrr";
  std::optional<int> target_size;
  std::optional<int> search_size;
  std::string measure = "ncc+msd";
  bool edge = false;
  int bins = kDefaultBins;
  double ncc_threshold = 0.5;
  unsigned threads = 1;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--preset", preset, "Window preset")
        ->check(CLI::IsMember({"vhrr", "ccd"}))
        ->capture_default_str();
    cmd->add_option("--target-size", target_size, "Target window side (odd)");
    cmd->add_option("--search-size", search_size, "Search window side (odd)");
    cmd->add_option("--measure", measure, "ncc+msd, ncc, ssd, msd, cra or mi")
        ->capture_default_str();
    cmd->add_flag("--edge", edge, "Match on Sobel edge images");
    cmd->add_option("--bins", bins, "Histogram bins for CRA and MI")
        ->check(CLI::Range(2, 4096))
        ->capture_default_str();
    cmd->add_option("--ncc-threshold", ncc_threshold, "NCC acceptance threshold")
        ->capture_default_str();
    cmd->add_option("--threads", threads, "Worker threads, 0 for all cores")
        ->capture_default_str();
  }

  MatchConfig config() const {
    MatchConfig cfg;
    cfg.windows = preset == "ccd" ? WindowSpec::ccd() : WindowSpec::vhrr();
    if (target_size) cfg.windows.target_size = *target_size;
    if (search_size) cfg.windows.search_size = *search_size;
    if (measure == "ncc+msd" || measure == "combined") {
      cfg.mode = MeasureMode::Combined;
    } else {
      cfg.mode = MeasureMode::Single;
      cfg.single_measure = parse_measure(measure);
    }
    cfg.edge_preprocess = edge;
    cfg.bins = bins;
    cfg.ncc_accept_threshold = ncc_threshold;
    cfg.threads = worker_count();
    cfg.validate();
    return cfg;
  }

  unsigned worker_count() const {
    return threads == 0 ? default_thread_count() : threads;
  }
};

void print_census(std::ostream& out, const MatchCensus& c) {
  out << "input GCPs: " << c.input << "\nmatched: " << c.matched() << '\n';
  for (std::size_t s = 1; s < kMatchStatusCount; ++s) {
    if (c.by_status[s] == 0) continue;
    out << "  " << to_string(static_cast<MatchStatus>(s)) << ": "
        << c.by_status[s] << '\n';
  }
}

template <typename T>
void write_text(const fs::path& path, T&& emit) {
  std::ostringstream buf;
  emit(buf);
  io::write_file(path, buf.str());
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::MalformedHeader:
    case ErrorCode::TruncatedData:
    case ErrorCode::UnsupportedMaxValue:
    case ErrorCode::MalformedLine:
    case ErrorCode::InvalidArgument:
      return kExitIo;
    default:
      return kExitAlgorithm;
  }
}

// ------------------------------------------------------------------ match

struct MatchCmd {
  MatchFlags flags;
  fs::path ref, sensed, gcps, out;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("match", "Locate GCPs in the sensed image");
    cmd->add_option("--ref", ref, "Reference image")->required();
    cmd->add_option("--sensed", sensed, "Sensed image")->required();
    cmd->add_option("--gcps", gcps, "GCP list (id,ref_scan,ref_pixel)")->required();
    cmd->add_option("--out", out, "Match table to write")->required();
    flags.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  int status = 0;

  void run() {
    const auto r = io::read_image(ref);
    const auto s = io::read_image(sensed);
    const auto g = io::read_gcps(gcps);
    const auto set = match_all(r, s, g, flags.config());
    write_text(out, [&](std::ostream& o) { io::format_matches(o, set.results); });
    print_census(std::cout, set.census);
    if (set.census.matched() < kMinMatches) {
      std::cerr << "gcpreg: only " << set.census.matched()
                << " GCPs matched; a degree-2 fit needs " << kMinMatches << '\n';
      status = kExitAlgorithm;
    }
  }
};

// --------------------------------------------------------------- register

struct RegisterCmd {
  MatchFlags flags;
  fs::path ref, sensed, gcps, out, report, report_kv, matches_out;
  int degree = kDefaultDegree;
  int fill = 0;
  bool no_timing = false;
  bool sweep = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("register", "Match, fit and resample");
    cmd->add_option("--ref", ref, "Reference image")->required();
    cmd->add_option("--sensed", sensed, "Sensed image")->required();
    cmd->add_option("--gcps", gcps, "GCP list")->required();
    cmd->add_option("--out", out, "Registered image to write")->required();
    cmd->add_option("--report", report, "Human-readable fit report");
    cmd->add_option("--report-kv", report_kv,
                    "Machine-readable report (default: <report>.kv)");
    cmd->add_option("--matches", matches_out, "Also write the match table");
    cmd->add_option("--degree", degree, "Polynomial degree")
        ->check(CLI::Range(kMinDegree, kMaxDegree))
        ->capture_default_str();
    cmd->add_option("--fill", fill, "Value for pixels mapped outside the sensed image")
        ->check(CLI::Range(0, 65535))
        ->capture_default_str();
    cmd->add_flag("--no-timing", no_timing, "Omit wall-clock times from reports");
    cmd->add_flag("--sweep", sweep, "Print fit RMSE for degrees 1 to 4");
    flags.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto r = io::read_image(ref);
    const auto s = io::read_image(sensed);
    const auto g = io::read_gcps(gcps);

    RegisterOptions opts;
    opts.match = flags.config();
    opts.degree = degree;
    opts.fill_value = static_cast<Sample>(fill);
    opts.threads = flags.worker_count();
    const auto reg = register_image(r, s, g, opts);

    io::write_image(reg.registered, out);
    if (!matches_out.empty()) {
      write_text(matches_out,
                 [&](std::ostream& o) { io::format_matches(o, reg.matches.results); });
    }
    const bool timing = !no_timing;
    if (!report.empty()) {
      write_text(report, [&](std::ostream& o) {
        io::format_fit_report_text(o, reg.fit.report, timing);
        io::format_radiometry(o, reg.radiometry);
      });
      report_kv = report_kv.empty() ? fs::path(report.string() + ".kv") : report_kv;
    }
    if (!report_kv.empty()) {
      write_text(report_kv, [&](std::ostream& o) {
        io::format_fit_report_kv(o, reg.fit.report, timing);
        io::format_radiometry(o, reg.radiometry);
      });
    }

    print_census(std::cout, reg.matches.census);
    io::format_fit_report_text(std::cout, reg.fit.report, timing);
    if (sweep) {
      io::format_degree_sweep(std::cout, degree_sweep(matched_pairs(reg.matches.results)));
    }
  }
};

// ---------------------------------------------------------------- overlay

struct OverlayCmd {
  fs::path image, boundary, lines, out;
  int burn = -1;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("overlay", "Burn a boundary onto an image");
    cmd->add_option("--image", image, "Image to draw on")->required();
    auto* b = cmd->add_option("--boundary", boundary, "Boundary raster (nonzero = boundary)");
    auto* l = cmd->add_option("--lines", lines, "Boundary polylines in the image frame");
    b->excludes(l);
    cmd->add_option("--burn", burn, "Burn value (default: image max_value)");
    cmd->add_option("--out", out, "Output image")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto img = io::read_image(image);
    RasterImage b;
    if (!lines.empty()) {
      b = rasterize_boundary(io::read_polylines(lines), img.width(), img.height());
    } else if (!boundary.empty()) {
      b = io::read_image(boundary);
    } else {
      throw Error(ErrorCode::InvalidArgument, "one of --boundary or --lines is required");
    }
    const Sample v = burn < 0 ? img.max_value() : static_cast<Sample>(burn);
    io::write_image(burn_overlay(img, b, v), out);
  }
};

// ----------------------------------------------------------- boundary-gen

struct BoundaryGenCmd {
  fs::path boundary, lines, pairs, out;
  std::vector<int> cut_origin, cut_size, canvas, placement, target;
  int pad = 0;
  int degree = kDefaultDegree;
  int burn = 255;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "boundary-gen", "Cut, pad and warp a boundary into the target frame");
    auto* b = cmd->add_option("--boundary", boundary, "Source boundary raster");
    auto* l = cmd->add_option("--lines", lines, "Source boundary polylines");
    b->excludes(l);
    cmd->add_option("--pairs", pairs, "Manual pairs: target_scan,target_pixel,source_scan,source_pixel")
        ->required();
    cmd->add_option("--cut-origin", cut_origin, "Cut origin SCAN PIXEL")->expected(2);
    cmd->add_option("--cut-size", cut_size, "Cut size HEIGHT WIDTH")->expected(2);
    cmd->add_option("--canvas", canvas, "Canvas size HEIGHT WIDTH")->expected(2);
    cmd->add_option("--placement", placement,
                    "Cut position on the canvas SCAN PIXEL (default: centred)")
        ->expected(2);
    cmd->add_option("--pad", pad, "Canvas pad value")->capture_default_str();
    cmd->add_option("--target", target, "Target frame HEIGHT WIDTH")->expected(2);
    cmd->add_option("--degree", degree, "Polynomial degree")
        ->check(CLI::Range(kMinDegree, kMaxDegree))
        ->capture_default_str();
    cmd->add_option("--burn", burn, "Line value for polyline input")->capture_default_str();
    cmd->add_option("--out", out, "Target-frame boundary raster")->required();
    cmd->callback([this] { run(); });
  }

  void run() {
    const auto p = io::read_pairs(pairs);
    if (!lines.empty()) {
      if (target.empty()) {
        throw Error(ErrorCode::InvalidArgument, "--target is required with --lines");
      }
      const auto pl = io::read_polylines(lines);
      const Sample burn_v = static_cast<Sample>(burn);
      io::write_image(transform_boundary(pl, p, {target[0], target[1]}, burn_v,
                                         std::max<Sample>(burn_v, 255), degree),
                      out);
      return;
    }
    if (boundary.empty()) {
      throw Error(ErrorCode::InvalidArgument, "one of --boundary or --lines is required");
    }
    RasterImage src = io::read_image(boundary);
    const PixelCoord origin = cut_origin.empty() ? PixelCoord{0, 0}
                                                 : PixelCoord{cut_origin[0], cut_origin[1]};
    const Extent cut = cut_size.empty() ? Extent{src.height() - origin.scan,
                                                 src.width() - origin.pixel}
                                        : Extent{cut_size[0], cut_size[1]};
    const Extent can = canvas.empty() ? cut : Extent{canvas[0], canvas[1]};
    std::optional<PixelCoord> place;
    if (!placement.empty()) place = PixelCoord{placement[0], placement[1]};
    const auto padded =
        cut_and_pad(src, origin, cut, can, static_cast<Sample>(pad), place);
    const Extent tgt = target.empty() ? can : Extent{target[0], target[1]};
    io::write_image(transform_boundary(padded, p, tgt, degree), out);
  }
};

// ------------------------------------------------------------------ synth

struct SynthCmd {
  fs::path out_dir, spec_file;
  int width = 512, height = 512;
  int max_value = 1023;
  std::uint64_t seed = 1;
  std::string kind = "shift";
  std::vector<double> params{4, -7};
  double noise = 0.0;
  std::vector<std::string> occlusions;
  double max_disp = 0.0;
  std::size_t gcp_count = 29;
  int margin = 0;
  std::string preset = "vhrr";

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Write a synthetic scene with ground truth");
    cmd->add_option("--out-dir", out_dir, "Directory for the scene files")->required();
    cmd->add_option("--spec", spec_file, "Distortion spec file (overrides --kind/--params)");
    cmd->add_option("--width", width)->check(CLI::Range(16, 65536))->capture_default_str();
    cmd->add_option("--height", height)->check(CLI::Range(16, 65536))->capture_default_str();
    cmd->add_option("--max-value", max_value)->check(CLI::Range(1, 65535))->capture_default_str();
    cmd->add_option("--seed", seed, "Texture, noise and GCP seed")->capture_default_str();
    cmd->add_option("--kind", kind, "shift, affine or quadratic")
        ->check(CLI::IsMember({"shift", "affine", "quadratic"}))
        ->capture_default_str();
    cmd->add_option("--params", params,
                    "shift: DS DP; affine: a00 a10 a01 b00 b10 b01; "
                    "quadratic: a00 a10 a01 a11 a20 a02 b00 b10 b01 b11 b20 b02");
    cmd->add_option("--noise", noise, "Gaussian noise sigma")->capture_default_str();
    cmd->add_option("--occlude", occlusions, "Flat disc SCAN,PIXEL,RADIUS,VALUE (repeatable)");
    cmd->add_option("--max-displacement", max_disp, "Reject specs displacing more (0: no bound)");
    cmd->add_option("--gcps", gcp_count, "Number of GCPs to place")->capture_default_str();
    cmd->add_option("--margin", margin, "GCP margin (default: search window radius + 1)");
    cmd->add_option("--preset", preset)->check(CLI::IsMember({"vhrr", "ccd"}))->capture_default_str();
    cmd->callback([this] { run(); });
  }

  DistortionSpec build_spec() const {
    if (!spec_file.empty()) return io::read_spec(spec_file);
    DistortionSpec spec;
    auto need = [&](std::size_t n) {
      if (params.size() != n) {
        throw Error(ErrorCode::InvalidArgument,
                    kind + " needs " + std::to_string(n) + " --params values");
      }
    };
    if (kind == "shift") {
      need(2);
      spec = DistortionSpec::shift(params[0], params[1]);
    } else if (kind == "affine") {
      need(6);
      std::array<double, 6> a{};
      std::copy(params.begin(), params.end(), a.begin());
      spec = DistortionSpec::affine(a);
    } else {
      need(12);
      std::array<double, 12> a{};
      std::copy(params.begin(), params.end(), a.begin());
      spec = DistortionSpec::quadratic(a);
    }
    spec.noise_sigma = noise;
    spec.seed = seed;
    if (max_disp > 0) spec.max_displacement = max_disp;
    for (const auto& o : occlusions) {
      std::vector<double> v;
      std::stringstream ss(o);
      for (std::string f; std::getline(ss, f, ',');) v.push_back(io::parse_double(f));
      if (v.size() != 4) {
        throw Error(ErrorCode::InvalidArgument, "--occlude wants SCAN,PIXEL,RADIUS,VALUE");
      }
      spec.occlusions.push_back({{v[0], v[1]}, v[2], static_cast<Sample>(v[3])});
    }
    return spec;
  }

  void run() {
    const auto spec = build_spec();
    const WindowSpec win = preset == "ccd" ? WindowSpec::ccd() : WindowSpec::vhrr();
    const auto ref = make_textured_reference(width, height, static_cast<Sample>(max_value), seed);
    const auto scene = generate_sensed(ref, spec);
    const int m = margin > 0 ? margin : win.search_size / 2 + 1;
    const auto gcps = place_gcps(ref, gcp_count, m, win.target_size);

    fs::create_directories(out_dir);
    io::write_image(ref, out_dir / "ref.pgm");
    io::write_image(scene.sensed, out_dir / "sensed.pgm");
    io::write_gcps(gcps, out_dir / "gcps.csv");
    io::write_model(scene.truth, out_dir / "truth.model");
    io::write_spec(spec, out_dir / "spec.txt");
    std::cout << "scene: " << width << "x" << height << ", " << gcps.size()
              << " GCPs, max displacement "
              << io::format_double(max_displacement(scene.truth, ref.extent()))
              << " px\n";
  }
};

// ------------------------------------------------------------------ bench

struct BenchCmd {
  MatchFlags flags;
  fs::path scene, ref, sensed, gcps, truth, out;
  int degree = kDefaultDegree;
  bool no_timing = false;

  void add(CLI::App& app) {
    auto* cmd = app.add_subcommand("bench", "Compare every matching mode on one scene");
    cmd->add_option("--scene", scene, "Directory written by synth");
    cmd->add_option("--ref", ref, "Reference image (overrides the scene)");
    cmd->add_option("--sensed", sensed, "Sensed image");
    cmd->add_option("--gcps", gcps, "GCP list");
    cmd->add_option("--truth", truth, "Ground-truth model");
    cmd->add_option("--degree", degree)
        ->check(CLI::Range(kMinDegree, kMaxDegree))
        ->capture_default_str();
    cmd->add_option("--out", out, "Also write the table as TSV");
    cmd->add_flag("--no-timing", no_timing, "Print '-' instead of wall-clock times");
    flags.add_to(cmd);
    cmd->callback([this] { run(); });
  }

  fs::path pick(const fs::path& given, const char* name) const {
    if (!given.empty()) return given;
    if (scene.empty()) {
      throw Error(ErrorCode::InvalidArgument,
                  std::string("--") + name + " or --scene is required");
    }
    return scene / name;
  }

  void run() {
    const auto r = io::read_image(ref.empty() ? pick(ref, "ref.pgm") : ref);
    const auto s = io::read_image(sensed.empty() ? pick(sensed, "sensed.pgm") : sensed);
    const auto g = io::read_gcps(gcps.empty() ? pick(gcps, "gcps.csv") : gcps);
    std::optional<WarpModel> t;
    if (!truth.empty()) {
      t = io::read_model(truth);
    } else if (!scene.empty() && fs::exists(scene / "truth.model")) {
      t = io::read_model(scene / "truth.model");
    }
    const auto rows = run_bench(r, s, g, bench_modes(flags.config()), degree, t);
    const bool timing = !no_timing;
    io::format_scorecards_text(std::cout, rows, timing);
    if (!out.empty()) {
      write_text(out, [&](std::ostream& o) { io::format_scorecards_tsv(o, rows, timing); });
    }
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GCP-based registration of a sensed image to a reference image"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gcpreg 0.1.0");

  MatchCmd match;
  RegisterCmd reg;
  OverlayCmd overlay;
  BoundaryGenCmd bgen;
  SynthCmd synth;
  BenchCmd bench;
  match.add(app);
  reg.add(app);
  overlay.add(app);
  bgen.add(app);
  synth.add(app);
  bench.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitIo;
  } catch (const InsufficientPointsError& e) {
    std::cerr << "gcpreg: " << e.what() << '\n';
    return kExitAlgorithm;
  } catch (const Error& e) {
    std::cerr << "gcpreg: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "gcpreg: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "gcpreg: " << e.what() << '\n';
    return kExitIo;
  }
  return match.status;
}
