#include "gcpreg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "gcpreg/resample.hpp"

namespace gcpreg {

double PortableRng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t PortableRng::below(std::uint64_t n) {
  if (n == 0) return 0;
  // Rejection keeps the draw unbiased.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double PortableRng::normal() {
  if (spare_) {
    const double v = *spare_;
    spare_.reset();
    return v;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  return r * std::cos(theta);
}

std::string_view to_string(DistortionKind k) {
  switch (k) {
    case DistortionKind::Shift: return "shift";
    case DistortionKind::Affine: return "affine";
    case DistortionKind::Quadratic: return "quadratic";
  }
  return "?";
}

DistortionKind parse_distortion_kind(std::string_view s) {
  if (s == "shift") return DistortionKind::Shift;
  if (s == "affine") return DistortionKind::Affine;
  if (s == "quadratic") return DistortionKind::Quadratic;
  throw Error(ErrorCode::InvalidArgument,
              "unknown distortion kind '" + std::string(s) + "'");
}

DistortionSpec DistortionSpec::shift(double d_scan, double d_pixel) {
  DistortionSpec s;
  s.kind = DistortionKind::Shift;
  s.forward = WarpModel::shift(d_scan, d_pixel);
  return s;
}

DistortionSpec DistortionSpec::affine(const std::array<double, 6>& p) {
  DistortionSpec s;
  s.kind = DistortionKind::Affine;
  // Lexicographic degree-1 order: (0,0), (0,1), (1,0).
  s.forward = WarpModel::from_raw(1, {p[0], p[2], p[1]}, {p[3], p[5], p[4]});
  return s;
}

DistortionSpec DistortionSpec::quadratic(const std::array<double, 12>& p) {
  DistortionSpec s;
  s.kind = DistortionKind::Quadratic;
  // Input order a00 a10 a01 a11 a20 a02; lexicographic order is
  // (0,0) (0,1) (0,2) (1,0) (1,1) (2,0).
  auto lex = [&](std::size_t o) {
    return std::vector<double>{p[o + 0], p[o + 2], p[o + 5],
                               p[o + 1], p[o + 3], p[o + 4]};
  };
  s.forward = WarpModel::from_raw(2, lex(0), lex(6));
  return s;
}

RasterImage make_textured_reference(int width, int height, Sample max_value,
                                    std::uint64_t seed) {
  PortableRng rng(seed);
  std::vector<double> field(static_cast<std::size_t>(width) * height, 0.0);
  constexpr std::array<int, 5> cells{32, 16, 8, 4, 2};
  constexpr std::array<double, 5> weights{1.0, 0.8, 0.7, 0.6, 0.5};
  for (std::size_t o = 0; o < cells.size(); ++o) {
    const int cell = cells[o];
    const int gh = height / cell + 2;
    const int gw = width / cell + 2;
    std::vector<double> lattice(static_cast<std::size_t>(gh) * gw);
    for (auto& v : lattice) v = rng.uniform() * 2.0 - 1.0;
    for (int r = 0; r < height; ++r) {
      const double fr = static_cast<double>(r) / cell;
      const int r0 = static_cast<int>(fr);
      const double tr = fr - r0;
      for (int c = 0; c < width; ++c) {
        const double fc = static_cast<double>(c) / cell;
        const int c0 = static_cast<int>(fc);
        const double tc = fc - c0;
        auto g = [&](int rr, int cc) {
          return lattice[static_cast<std::size_t>(rr) * gw + cc];
        };
        const double top = g(r0, c0) * (1 - tc) + g(r0, c0 + 1) * tc;
        const double bot = g(r0 + 1, c0) * (1 - tc) + g(r0 + 1, c0 + 1) * tc;
        field[static_cast<std::size_t>(r) * width + c] +=
            weights[o] * (top * (1 - tr) + bot * tr);
      }
    }
  }
  const auto [lo, hi] = std::minmax_element(field.begin(), field.end());
  const double span = *hi - *lo > 0 ? *hi - *lo : 1.0;
  std::vector<Sample> samples(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double t = (field[i] - *lo) / span;
    samples[i] = static_cast<Sample>(
        std::lround((0.05 + 0.9 * t) * max_value));
  }
  return RasterImage(width, height, max_value, std::move(samples));
}

double max_displacement(const WarpModel& f, Extent frame, int step) {
  double worst = 0.0;
  auto visit = [&](double s, double p) {
    const Point2 q = f.evaluate(s, p);
    worst = std::max({worst, std::abs(q.scan - s), std::abs(q.pixel - p)});
  };
  const int last_s = frame.height - 1;
  const int last_p = frame.width - 1;
  for (int s = 0;; s = std::min(s + step, last_s)) {
    for (int p = 0;; p = std::min(p + step, last_p)) {
      visit(s, p);
      if (p == last_p) break;
    }
    if (s == last_s) break;
  }
  return worst;
}

namespace {

// Jacobian of f by central differences; exact for polynomials of degree <= 2.
std::array<double, 4> jacobian(const WarpModel& f, Point2 p) {
  const Point2 sp = f.evaluate(p.scan + 1.0, p.pixel);
  const Point2 sm = f.evaluate(p.scan - 1.0, p.pixel);
  const Point2 pp = f.evaluate(p.scan, p.pixel + 1.0);
  const Point2 pm = f.evaluate(p.scan, p.pixel - 1.0);
  return {0.5 * (sp.scan - sm.scan), 0.5 * (pp.scan - pm.scan),
          0.5 * (sp.pixel - sm.pixel), 0.5 * (pp.pixel - pm.pixel)};
}

void check_orientation(const WarpModel& f, Extent frame) {
  const int step = 16;
  for (int s = 0;; s = std::min(s + step, frame.height - 1)) {
    for (int p = 0;; p = std::min(p + step, frame.width - 1)) {
      const auto j = jacobian(f, {static_cast<double>(s),
                                  static_cast<double>(p)});
      if (j[0] * j[3] - j[1] * j[2] <= 0.0) {
        throw Error(ErrorCode::NonInvertibleSpec,
                    "NonInvertibleSpec: Jacobian not positive at (" +
                        std::to_string(s) + "," + std::to_string(p) + ")");
      }
      if (p == frame.width - 1) break;
    }
    if (s == frame.height - 1) break;
  }
}

}  // namespace

std::optional<Point2> invert_point(const WarpModel& f, Point2 q) {
  const Point2 fq = f.evaluate(q);
  Point2 p{q.scan - (fq.scan - q.scan), q.pixel - (fq.pixel - q.pixel)};
  for (int iter = 0; iter < 50; ++iter) {
    const Point2 fp = f.evaluate(p);
    const double rs = fp.scan - q.scan;
    const double rp = fp.pixel - q.pixel;
    if (std::abs(rs) < 1e-10 && std::abs(rp) < 1e-10) return p;
    const auto j = jacobian(f, p);
    const double det = j[0] * j[3] - j[1] * j[2];
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    p.scan -= (j[3] * rs - j[1] * rp) / det;
    p.pixel -= (-j[2] * rs + j[0] * rp) / det;
  }
  const Point2 fp = f.evaluate(p);
  if (std::abs(fp.scan - q.scan) < 1e-7 && std::abs(fp.pixel - q.pixel) < 1e-7) {
    return p;
  }
  return std::nullopt;
}

SynthScene generate_sensed(const RasterImage& ref, const DistortionSpec& spec) {
  const WarpModel& f = spec.forward;
  const Extent frame = ref.extent();
  if (spec.kind == DistortionKind::Quadratic || f.degree() > 1) {
    check_orientation(f, frame);
  } else {
    const auto j = jacobian(f, {0.0, 0.0});
    if (j[0] * j[3] - j[1] * j[2] <= 0.0) {
      throw Error(ErrorCode::NonInvertibleSpec,
                  "NonInvertibleSpec: linear part is singular or reflecting");
    }
  }
  const double disp = max_displacement(f, frame, f.degree() > 1 ? 8 : 1 << 30);
  if (disp > spec.max_displacement) {
    throw Error(ErrorCode::DisplacementBound,
                "distortion displaces up to " + std::to_string(disp) +
                    " px, above the declared bound " +
                    std::to_string(spec.max_displacement));
  }

  RasterImage sensed(ref.width(), ref.height(), ref.max_value());
  const bool pure_shift = spec.kind == DistortionKind::Shift;
  const Point2 shift = f.evaluate(0.0, 0.0);
  for (int s = 0; s < ref.height(); ++s) {
    auto dst = sensed.mutable_row(s);
    for (int p = 0; p < ref.width(); ++p) {
      std::optional<Point2> pre;
      if (pure_shift) {
        pre = Point2{s - shift.scan, p - shift.pixel};
      } else {
        pre = invert_point(f, {static_cast<double>(s), static_cast<double>(p)});
      }
      if (!pre) {
        throw Error(ErrorCode::NonInvertibleSpec,
                    "NonInvertibleSpec: no pre-image for (" +
                        std::to_string(s) + "," + std::to_string(p) + ")");
      }
      const long long rs = round_half_away(pre->scan);
      const long long rp = round_half_away(pre->pixel);
      const bool inside =
          rs >= 0 && rs < ref.height() && rp >= 0 && rp < ref.width();
      dst[p] = inside ? ref.at(static_cast<int>(rs), static_cast<int>(rp)) : 0;
    }
  }

  if (spec.noise_sigma > 0.0) {
    PortableRng rng(spec.seed);
    const double top = ref.max_value();
    for (int s = 0; s < sensed.height(); ++s) {
      for (auto& v : sensed.mutable_row(s)) {
        const double noisy = v + spec.noise_sigma * rng.normal();
        v = static_cast<Sample>(std::clamp(std::round(noisy), 0.0, top));
      }
    }
  }

  for (const auto& occ : spec.occlusions) {
    if (occ.value > sensed.max_value()) {
      throw Error(ErrorCode::InvalidArgument, "occlusion value exceeds max_value");
    }
    const int s0 = std::max(0, static_cast<int>(std::floor(occ.center.scan - occ.radius)));
    const int s1 = std::min(sensed.height() - 1,
                            static_cast<int>(std::ceil(occ.center.scan + occ.radius)));
    const int p0 = std::max(0, static_cast<int>(std::floor(occ.center.pixel - occ.radius)));
    const int p1 = std::min(sensed.width() - 1,
                            static_cast<int>(std::ceil(occ.center.pixel + occ.radius)));
    for (int s = s0; s <= s1; ++s) {
      auto row = sensed.mutable_row(s);
      for (int p = p0; p <= p1; ++p) {
        const double ds = s - occ.center.scan;
        const double dp = p - occ.center.pixel;
        if (ds * ds + dp * dp <= occ.radius * occ.radius) row[p] = occ.value;
      }
    }
  }

  return {std::move(sensed), f};
}

std::vector<GroundControlPoint> place_gcps(const RasterImage& img,
                                           std::size_t count, int margin,
                                           int target_size,
                                           double min_stddev) {
  std::vector<GroundControlPoint> out;
  if (count == 0) return out;
  const int lo_s = margin;
  const int hi_s = img.height() - 1 - margin;
  const int lo_p = margin;
  const int hi_p = img.width() - 1 - margin;
  if (hi_s < lo_s || hi_p < lo_p) return out;

  const auto cols = static_cast<std::size_t>(
      std::ceil(std::sqrt(static_cast<double>(count))));
  const std::size_t rows = (count + cols - 1) / cols;
  auto spread = [](int lo, int hi, std::size_t i, std::size_t n) {
    if (n <= 1) return (lo + hi) / 2;
    return lo + static_cast<int>(std::lround(static_cast<double>(hi - lo) *
                                             i / (n - 1)));
  };
  for (std::size_t r = 0; r < rows && out.size() < count; ++r) {
    for (std::size_t c = 0; c < cols && out.size() < count; ++c) {
      const PixelCoord at{spread(lo_s, hi_s, r, rows),
                          spread(lo_p, hi_p, c, cols)};
      if (!window_fits(img, at, target_size)) continue;
      const Window w = extract_window(img, at, target_size);
      double mean = 0.0;
      for (Sample v : w.samples) mean += v;
      mean /= static_cast<double>(w.size());
      double var = 0.0;
      for (Sample v : w.samples) var += (v - mean) * (v - mean);
      var /= static_cast<double>(w.size());
      if (std::sqrt(var) < min_stddev) continue;
      char id[16];
      std::snprintf(id, sizeof id, "G%02zu", out.size() + 1);
      out.push_back({id, at});
    }
  }
  return out;
}

Scorecard score_run(const std::vector<MatchResult>& matches,
                    const std::optional<WarpModel>& model,
                    const WarpModel& ground_truth, std::string measure_label,
                    double seconds) {
  Scorecard card;
  card.measure = std::move(measure_label);
  card.census = tally(matches);
  card.input_gcps = card.census.input;
  card.matched = card.census.matched();
  card.seconds = seconds;
  if (!model) return card;
  std::vector<double> es;
  std::vector<double> ep;
  for (const auto& m : matches) {
    if (!m.matched()) continue;
    const Point2 ref{static_cast<double>(m.ref_coord.scan),
                     static_cast<double>(m.ref_coord.pixel)};
    const Point2 got = model->evaluate(ref);
    const Point2 want = ground_truth.evaluate(ref);
    es.push_back(got.scan - want.scan);
    ep.push_back(got.pixel - want.pixel);
  }
  card.rmse_scan = rms(es);
  card.rmse_pixel = rms(ep);
  return card;
}

}  // namespace gcpreg
