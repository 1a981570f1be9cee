#ifndef GCPREG_RESAMPLE_HPP
#define GCPREG_RESAMPLE_HPP

#include <cmath>
#include <cstddef>

#include "gcpreg/core.hpp"
#include "gcpreg/warp.hpp"

namespace gcpreg {

/// Rounds to the nearest integer, halves away from zero.
inline long long round_half_away(double v) {
  return static_cast<long long>(std::round(v));
}

/// Backward-maps every output pixel through `model` into `sensed` and copies
/// the nearest sample, or `fill_value` when the mapped location is outside.
/// Output keeps the sensed max_value. Rows are processed by `threads`
/// workers; the result does not depend on the worker count.
RasterImage resample_nn(const RasterImage& sensed, const WarpModel& model,
                        int out_width, int out_height, Sample fill_value = 0,
                        unsigned threads = 1);

struct RadiometryReport {
  /// Total-variation distance between the grey-level distributions of the
  /// sensed and registered images, fill-valued samples excluded from both.
  double tv_distance = 0.0;
  /// Distinct registered grey values absent from the sensed image.
  std::size_t new_value_count = 0;
  std::size_t compared_pixels = 0;
  std::size_t fill_pixels = 0;
};

RadiometryReport radiometry_report(const RasterImage& sensed,
                                   const RasterImage& registered,
                                   Sample fill_value = 0);

}  // namespace gcpreg

#endif  // GCPREG_RESAMPLE_HPP
