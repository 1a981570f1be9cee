#include "gcpreg/overlay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "gcpreg/resample.hpp"

namespace gcpreg {

namespace {

std::vector<PointPair> as_pairs(const std::vector<ManualPair>& pairs,
                                bool target_to_source) {
  std::vector<PointPair> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) {
    out.push_back(target_to_source ? PointPair{p.target, p.source}
                                   : PointPair{p.source, p.target});
  }
  return out;
}

void plot_segment(RasterImage& img, long long r0, long long c0, long long r1,
                  long long c1, Sample value) {
  // Reject segments whose bounding box misses the raster.
  if (std::max(r0, r1) < 0 || std::min(r0, r1) >= img.height() ||
      std::max(c0, c1) < 0 || std::min(c0, c1) >= img.width()) {
    return;
  }
  const long long dr = std::llabs(r1 - r0);
  const long long dc = std::llabs(c1 - c0);
  const int sr = r0 < r1 ? 1 : -1;
  const int sc = c0 < c1 ? 1 : -1;
  long long err = dc - dr;
  long long r = r0;
  long long c = c0;
  bool entered = false;
  while (true) {
    const bool inside =
        r >= 0 && r < img.height() && c >= 0 && c < img.width();
    if (inside) {
      img.mutable_row(static_cast<int>(r))[static_cast<std::size_t>(c)] = value;
      entered = true;
    } else if (entered) {
      // A straight line cannot re-enter a rectangle it has left.
      break;
    }
    if (r == r1 && c == c1) break;
    const long long e2 = 2 * err;
    if (e2 > -dr) {
      err -= dr;
      c += sc;
    }
    if (e2 < dc) {
      err += dc;
      r += sr;
    }
  }
}

}  // namespace

void BoundaryPolyline::validate() const {
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].size() < 2) {
      throw Error(ErrorCode::InvalidArgument,
                  "polyline " + std::to_string(i) + " has fewer than 2 vertices");
    }
    for (const auto& v : lines[i]) {
      if (!std::isfinite(v.scan) || !std::isfinite(v.pixel)) {
        throw Error(ErrorCode::InvalidArgument,
                    "polyline " + std::to_string(i) +
                        " has a non-finite vertex");
      }
    }
  }
}

PixelCoord centered_origin(Extent cut, Extent canvas) {
  return {(canvas.height - cut.height) / 2, (canvas.width - cut.width) / 2};
}

RasterImage cut_and_pad(const RasterImage& src, PixelCoord cut_origin,
                        Extent cut, Extent canvas, Sample pad_value,
                        std::optional<PixelCoord> placement) {
  if (cut.height < 1 || cut.width < 1 || cut_origin.scan < 0 ||
      cut_origin.pixel < 0 || cut_origin.scan + cut.height > src.height() ||
      cut_origin.pixel + cut.width > src.width()) {
    throw Error(ErrorCode::OutOfBounds, "cut region leaves the source image");
  }
  if (canvas.height < cut.height || canvas.width < cut.width) {
    throw Error(ErrorCode::CanvasTooSmall, "canvas smaller than the cut");
  }
  if (pad_value > src.max_value()) {
    throw Error(ErrorCode::InvalidArgument, "pad value exceeds max_value");
  }
  const PixelCoord at = placement.value_or(centered_origin(cut, canvas));
  if (at.scan < 0 || at.pixel < 0 || at.scan + cut.height > canvas.height ||
      at.pixel + cut.width > canvas.width) {
    throw Error(ErrorCode::OutOfBounds, "cut placement leaves the canvas");
  }
  RasterImage out = RasterImage::filled(canvas.width, canvas.height,
                                        src.max_value(), pad_value);
  for (int r = 0; r < cut.height; ++r) {
    auto from = src.row(cut_origin.scan + r)
                    .subspan(static_cast<std::size_t>(cut_origin.pixel),
                             static_cast<std::size_t>(cut.width));
    std::copy(from.begin(), from.end(),
              out.mutable_row(at.scan + r).begin() + at.pixel);
  }
  return out;
}

RasterImage rasterize_boundary(const BoundaryPolyline& lines, int width,
                               int height, Sample burn_value,
                               Sample max_value) {
  lines.validate();
  if (burn_value == 0 || burn_value > max_value) {
    throw Error(ErrorCode::InvalidArgument,
                "burn value must be in [1, max_value]");
  }
  RasterImage out(width, height, max_value);
  for (const auto& line : lines.lines) {
    for (std::size_t i = 0; i + 1 < line.size(); ++i) {
      plot_segment(out, round_half_away(line[i].scan),
                   round_half_away(line[i].pixel),
                   round_half_away(line[i + 1].scan),
                   round_half_away(line[i + 1].pixel), burn_value);
    }
  }
  return out;
}

RasterImage transform_boundary(const RasterImage& boundary,
                               const std::vector<ManualPair>& pairs,
                               Extent target, int degree) {
  const auto pts = as_pairs(pairs, true);
  const FitResult fit = fit_warp(pts, degree);
  return resample_nn(boundary, fit.model, target.width, target.height, 0);
}

BoundaryPolyline transform_polylines(const BoundaryPolyline& lines,
                                     const std::vector<ManualPair>& pairs,
                                     int degree) {
  lines.validate();
  const auto pts = as_pairs(pairs, false);
  const FitResult fit = fit_warp(pts, degree);
  BoundaryPolyline out;
  out.frame = lines.frame;
  out.lines.reserve(lines.lines.size());
  for (const auto& line : lines.lines) {
    std::vector<Point2> mapped;
    mapped.reserve(line.size());
    for (const auto& v : line) mapped.push_back(fit.model.evaluate(v));
    out.lines.push_back(std::move(mapped));
  }
  return out;
}

RasterImage transform_boundary(const BoundaryPolyline& lines,
                               const std::vector<ManualPair>& pairs,
                               Extent target, Sample burn_value,
                               Sample max_value, int degree) {
  return rasterize_boundary(transform_polylines(lines, pairs, degree),
                            target.width, target.height, burn_value,
                            max_value);
}

RasterImage burn_overlay(const RasterImage& img, const RasterImage& boundary,
                         Sample burn_value) {
  if (img.extent() != boundary.extent()) {
    throw Error(ErrorCode::SizeMismatch,
                "boundary raster size differs from the image");
  }
  if (burn_value > img.max_value()) {
    throw Error(ErrorCode::InvalidArgument, "burn value exceeds max_value");
  }
  RasterImage out = img;
  for (int r = 0; r < img.height(); ++r) {
    auto b = boundary.row(r);
    auto dst = out.mutable_row(r);
    for (int c = 0; c < img.width(); ++c) {
      if (b[c] != 0) dst[c] = burn_value;
    }
  }
  return out;
}

}  // namespace gcpreg
