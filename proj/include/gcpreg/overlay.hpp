#ifndef GCPREG_OVERLAY_HPP
#define GCPREG_OVERLAY_HPP

#include <optional>
#include <string>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/warp.hpp"

namespace gcpreg {

/// Polylines of real-valued (scan, pixel) vertices in one coordinate frame.
struct BoundaryPolyline {
  std::string frame;
  std::vector<std::vector<Point2>> lines;

  /// Throws InvalidArgument for a line with fewer than 2 vertices or a
  /// non-finite coordinate.
  void validate() const;
};

/// Manually identified correspondence between the target frame (where the
/// boundary is wanted) and the source frame (where it is known).
struct ManualPair {
  Point2 target;
  Point2 source;
};

/// Where a cut block lands on its canvas: centred unless `placement` says
/// otherwise.
PixelCoord centered_origin(Extent cut, Extent canvas);

/// Copies `cut` starting at `cut_origin` out of `src` and places it on a
/// `canvas` filled with `pad_value`. Throws OutOfBounds, CanvasTooSmall.
RasterImage cut_and_pad(const RasterImage& src, PixelCoord cut_origin,
                        Extent cut, Extent canvas, Sample pad_value = 0,
                        std::optional<PixelCoord> placement = std::nullopt);

/// Draws every segment with 8-connected Bresenham lines on a zero
/// background. Vertices are rounded half away from zero; pixels outside the
/// raster are dropped.
RasterImage rasterize_boundary(const BoundaryPolyline& lines, int width,
                               int height, Sample burn_value = 255,
                               Sample max_value = 255);

/// Fits a target->source model from the pairs and NN-resamples the boundary
/// raster into a target-frame raster of size `target`.
RasterImage transform_boundary(const RasterImage& boundary,
                               const std::vector<ManualPair>& pairs,
                               Extent target, int degree = kDefaultDegree);

/// Fits a source->target model from the pairs and maps every vertex.
BoundaryPolyline transform_polylines(const BoundaryPolyline& lines,
                                     const std::vector<ManualPair>& pairs,
                                     int degree = kDefaultDegree);

/// Vertex path: transforms the vertices, then rasterizes in the target frame.
RasterImage transform_boundary(const BoundaryPolyline& lines,
                               const std::vector<ManualPair>& pairs,
                               Extent target, Sample burn_value = 255,
                               Sample max_value = 255,
                               int degree = kDefaultDegree);

/// `img` with every pixel where `boundary` is nonzero set to `burn_value`.
/// Throws SizeMismatch.
RasterImage burn_overlay(const RasterImage& img, const RasterImage& boundary,
                         Sample burn_value);

}  // namespace gcpreg

#endif  // GCPREG_OVERLAY_HPP
