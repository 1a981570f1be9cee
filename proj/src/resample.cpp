#include "gcpreg/resample.hpp"

#include <cmath>
#include <vector>

namespace gcpreg {

RasterImage resample_nn(const RasterImage& sensed, const WarpModel& model,
                        int out_width, int out_height, Sample fill_value,
                        unsigned threads) {
  if (out_width < 1 || out_height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "output dimensions must be at least 1x1");
  }
  if (fill_value > sensed.max_value()) {
    throw Error(ErrorCode::InvalidArgument,
                "fill value exceeds the sensed max_value");
  }
  RasterImage out(out_width, out_height, sensed.max_value());
  parallel_for(static_cast<std::size_t>(out_height), threads,
               [&](std::size_t row) {
                 const int scan = static_cast<int>(row);
                 auto dst = out.mutable_row(scan);
                 for (int pixel = 0; pixel < out_width; ++pixel) {
                   const Point2 p = model.evaluate(scan, pixel);
                   if (!(std::abs(p.scan) < 1e9) || !(std::abs(p.pixel) < 1e9)) {
                     dst[pixel] = fill_value;
                     continue;
                   }
                   const long long s = round_half_away(p.scan);
                   const long long c = round_half_away(p.pixel);
                   const bool inside = s >= 0 && s < sensed.height() &&
                                       c >= 0 && c < sensed.width();
                   dst[pixel] = inside ? sensed.at(static_cast<int>(s),
                                                   static_cast<int>(c))
                                       : fill_value;
                 }
               });
  return out;
}

RadiometryReport radiometry_report(const RasterImage& sensed,
                                   const RasterImage& registered,
                                   Sample fill_value) {
  const std::size_t levels =
      static_cast<std::size_t>(
          std::max(sensed.max_value(), registered.max_value())) +
      1;
  std::vector<std::size_t> hs(levels, 0);
  std::vector<std::size_t> hr(levels, 0);
  std::size_t ns = 0;
  RadiometryReport rep;
  for (Sample v : sensed.samples()) {
    if (v == fill_value) continue;
    ++hs[v];
    ++ns;
  }
  for (Sample v : registered.samples()) {
    if (v == fill_value) {
      ++rep.fill_pixels;
      continue;
    }
    ++hr[v];
    ++rep.compared_pixels;
  }
  double tv = 0.0;
  for (std::size_t v = 0; v < levels; ++v) {
    if (hr[v] > 0 && hs[v] == 0) ++rep.new_value_count;
    const double ps = ns ? static_cast<double>(hs[v]) / ns : 0.0;
    const double pr = rep.compared_pixels
                          ? static_cast<double>(hr[v]) / rep.compared_pixels
                          : 0.0;
    tv += std::abs(ps - pr);
  }
  rep.tv_distance = 0.5 * tv;
  return rep;
}

}  // namespace gcpreg
