#include "gcpreg/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gcpreg {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool searchable(const RasterImage& ref, const RasterImage& sensed,
                PixelCoord c, const WindowSpec& w) {
  return window_fits(ref, c, w.target_size) &&
         window_fits(sensed, c, w.search_size);
}

bool better(Measure m, double a, double b) {
  return lower_is_better(m) ? a < b : a > b;
}

MatchResult unmatched(const GroundControlPoint& gcp, MatchStatus status) {
  MatchResult r;
  r.gcp_id = gcp.id;
  r.ref_coord = gcp.ref_coord;
  r.sensed_coord = gcp.ref_coord;
  r.ncc_score = kNaN;
  r.ssd_score = kNaN;
  r.score = kNaN;
  r.status = status;
  return r;
}

// Score of `m` at one offset, recomputed from the images.
std::optional<double> score_at(const RasterImage& ref,
                               const RasterImage& sensed,
                               const GroundControlPoint& gcp, int side,
                               Offset o, Measure m, int bins) {
  Window target;
  Window candidate;
  extract_window_into(ref, gcp.ref_coord, side, target);
  extract_window_into(sensed, gcp.ref_coord + o, side, candidate);
  return try_measure(m, target, candidate, bins);
}

double value_or_nan(std::optional<double> v) { return v ? *v : kNaN; }

bool single_accepts(const MatchConfig& cfg, double score,
                    const Window& target) {
  switch (cfg.single_measure) {
    case Measure::Ncc:
      return score >= cfg.ncc_accept_threshold;
    case Measure::Ssd:
      return std::sqrt(score / static_cast<double>(target.size())) <=
             cfg.ssd_accept_rms_fraction * target.max_value;
    case Measure::Cra:
      return score >= cfg.cra_accept_threshold;
    case Measure::Mi: {
      JointHistogram h(target, target, cfg.bins);
      const double ht = h.ref_entropy();
      return ht > 0.0 && score / ht >= cfg.mi_accept_ratio;
    }
  }
  return false;
}

MatchResult match_prepared(const RasterImage& ref, const RasterImage& sensed,
                           const GroundControlPoint& gcp,
                           const MatchConfig& cfg) {
  const WindowSpec& w = cfg.windows;
  if (!searchable(ref, sensed, gcp.ref_coord, w)) {
    return unmatched(gcp, MatchStatus::OutOfBounds);
  }

  MatchResult r;
  r.gcp_id = gcp.id;
  r.ref_coord = gcp.ref_coord;

  if (cfg.mode == MeasureMode::Combined) {
    const auto ncc_surface = build_surface(ref, sensed, gcp, cfg, Measure::Ncc);
    const auto ssd_surface = build_surface(ref, sensed, gcp, cfg, Measure::Ssd);
    const auto ncc_best = ncc_surface.best();
    const auto ssd_best = ssd_surface.best();
    if (!ncc_best) {
      r = unmatched(gcp, MatchStatus::ZeroVariance);
      if (ssd_best) r.ssd_score = ssd_surface.score(*ssd_best);
      return r;
    }
    r.offset = *ncc_best;
    r.sensed_coord = gcp.ref_coord + r.offset;
    r.ncc_score = ncc_surface.score(*ncc_best);
    r.ssd_score = ssd_surface.score(*ncc_best);
    r.score = r.ncc_score;
    if (!ssd_best || *ssd_best != *ncc_best) {
      r.status = MatchStatus::CriterionDisagreement;
    } else if (r.ncc_score < cfg.ncc_accept_threshold) {
      r.status = MatchStatus::LowScore;
    } else {
      r.status = MatchStatus::Matched;
    }
    return r;
  }

  const Measure m = cfg.single_measure;
  const auto surface = build_surface(ref, sensed, gcp, cfg, m);
  const auto best = surface.best();
  if (!best) {
    return unmatched(gcp, MatchStatus::ZeroVariance);
  }
  r.offset = *best;
  r.sensed_coord = gcp.ref_coord + r.offset;
  r.score = surface.score(*best);
  r.ncc_score = value_or_nan(score_at(ref, sensed, gcp, w.target_size, *best,
                                      Measure::Ncc, cfg.bins));
  r.ssd_score = value_or_nan(score_at(ref, sensed, gcp, w.target_size, *best,
                                      Measure::Ssd, cfg.bins));
  const Window target = extract_window(ref, gcp.ref_coord, w.target_size);
  r.status = single_accepts(cfg, r.score, target) ? MatchStatus::Matched
                                                  : MatchStatus::LowScore;
  return r;
}

}  // namespace

void WindowSpec::validate() const {
  if (target_size < 1 || target_size % 2 == 0 || search_size % 2 == 0 ||
      target_size >= search_size) {
    throw Error(ErrorCode::InvalidArgument,
                "window sizes must be odd with 1 <= target < search (got T=" +
                    std::to_string(target_size) +
                    ", S=" + std::to_string(search_size) + ")");
  }
}

void MatchConfig::validate() const {
  windows.validate();
  if (!(ncc_accept_threshold > 0.0 && ncc_accept_threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "ncc threshold must lie in (0, 1]");
  }
  if (bins < 2) {
    throw Error(ErrorCode::InvalidArgument, "bins must be at least 2");
  }
}

std::string MatchConfig::label() const {
  if (mode == MeasureMode::Combined) return "ncc+msd";
  return std::string(to_string(single_measure));
}

SimilaritySurface::SimilaritySurface(Measure measure, int radius)
    : measure_(measure), radius_(radius) {
  const auto n = static_cast<std::size_t>(side()) * side();
  scores_.assign(n, kNaN);
  valid_.assign(n, 0);
}

void SimilaritySurface::set(Offset o, std::optional<double> value) {
  const auto i = index(o);
  valid_[i] = value && std::isfinite(*value) ? 1 : 0;
  scores_[i] = valid_[i] ? *value : kNaN;
}

std::size_t SimilaritySurface::valid_count() const {
  return static_cast<std::size_t>(
      std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

std::optional<Offset> SimilaritySurface::best() const {
  std::optional<Offset> best;
  double best_score = 0.0;
  int best_norm = 0;
  for (int ds = -radius_; ds <= radius_; ++ds) {
    for (int dp = -radius_; dp <= radius_; ++dp) {
      const Offset o{ds, dp};
      const auto i = index(o);
      if (!valid_[i]) continue;
      const double s = scores_[i];
      const int norm = ds * ds + dp * dp;
      if (!best || better(measure_, s, best_score) ||
          (s == best_score && norm < best_norm)) {
        best = o;
        best_score = s;
        best_norm = norm;
      }
    }
  }
  return best;
}

std::string_view to_string(MatchStatus s) {
  switch (s) {
    case MatchStatus::Matched: return "matched";
    case MatchStatus::OutOfBounds: return "out_of_bounds";
    case MatchStatus::ZeroVariance: return "zero_variance";
    case MatchStatus::CriterionDisagreement: return "criterion_disagreement";
    case MatchStatus::LowScore: return "low_score";
  }
  return "?";
}

MatchStatus parse_match_status(std::string_view s) {
  for (std::size_t i = 0; i < kMatchStatusCount; ++i) {
    const auto st = static_cast<MatchStatus>(i);
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::InvalidArgument,
              "unknown match status '" + std::string(s) + "'");
}

MatchCensus tally(const std::vector<MatchResult>& results) {
  MatchCensus c;
  c.input = results.size();
  for (const auto& r : results) ++c.by_status[static_cast<std::size_t>(r.status)];
  return c;
}

SimilaritySurface build_surface(const RasterImage& ref,
                                const RasterImage& sensed,
                                const GroundControlPoint& gcp,
                                const MatchConfig& cfg, Measure measure) {
  const WindowSpec& w = cfg.windows;
  w.validate();
  if (!searchable(ref, sensed, gcp.ref_coord, w)) {
    throw Error(ErrorCode::GcpOutOfBounds,
                "GcpOutOfBounds: " + gcp.id);
  }
  const int radius = w.radius();
  SimilaritySurface surface(measure, radius);
  Window target;
  Window candidate;
  extract_window_into(ref, gcp.ref_coord, w.target_size, target);
  for (int ds = -radius; ds <= radius; ++ds) {
    for (int dp = -radius; dp <= radius; ++dp) {
      const Offset o{ds, dp};
      extract_window_into(sensed, gcp.ref_coord + o, w.target_size, candidate);
      surface.set(o, try_measure(measure, target, candidate, cfg.bins));
    }
  }
  return surface;
}

MatchResult match_gcp(const RasterImage& ref, const RasterImage& sensed,
                      const GroundControlPoint& gcp, const MatchConfig& cfg) {
  cfg.validate();
  if (cfg.edge_preprocess) {
    return match_prepared(edge_extract(ref), edge_extract(sensed), gcp, cfg);
  }
  return match_prepared(ref, sensed, gcp, cfg);
}

MatchSet match_all(const RasterImage& ref, const RasterImage& sensed,
                   const std::vector<GroundControlPoint>& gcps,
                   const MatchConfig& cfg) {
  if (gcps.empty()) {
    throw Error(ErrorCode::EmptyGcpList, "EmptyGcpList: no GCPs to match");
  }
  cfg.validate();

  RasterImage ref_edges;
  RasterImage sensed_edges;
  if (cfg.edge_preprocess) {
    ref_edges = edge_extract(ref);
    sensed_edges = edge_extract(sensed);
  }
  const RasterImage& r = cfg.edge_preprocess ? ref_edges : ref;
  const RasterImage& s = cfg.edge_preprocess ? sensed_edges : sensed;

  MatchSet out;
  out.results.resize(gcps.size());
  parallel_for(gcps.size(), cfg.threads, [&](std::size_t i) {
    out.results[i] = match_prepared(r, s, gcps[i], cfg);
  });
  out.census = tally(out.results);
  return out;
}

RasterImage edge_extract(const RasterImage& img) {
  if (img.width() < 3 || img.height() < 3) {
    throw Error(ErrorCode::TooSmall, "edge extraction needs at least 3x3");
  }
  const int h = img.height();
  const int w = img.width();
  RasterImage out(w, h, img.max_value());
  auto px = [&](int r, int c) -> int {
    return img.at(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1));
  };
  for (int r = 0; r < h; ++r) {
    auto dst = out.mutable_row(r);
    for (int c = 0; c < w; ++c) {
      const int gx = (px(r - 1, c + 1) + 2 * px(r, c + 1) + px(r + 1, c + 1)) -
                     (px(r - 1, c - 1) + 2 * px(r, c - 1) + px(r + 1, c - 1));
      const int gy = (px(r + 1, c - 1) + 2 * px(r + 1, c) + px(r + 1, c + 1)) -
                     (px(r - 1, c - 1) + 2 * px(r - 1, c) + px(r - 1, c + 1));
      const int mag = std::abs(gx) + std::abs(gy);
      dst[c] = static_cast<Sample>(std::min<int>(mag, img.max_value()));
    }
  }
  return out;
}

}  // namespace gcpreg
