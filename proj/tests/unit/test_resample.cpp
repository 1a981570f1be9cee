#include "doctest.h"

#include <set>

#include "gcpreg/resample.hpp"
#include "helpers.hpp"

using namespace gcpreg;

namespace {

// Every sample is distinct and non-zero, so a value identifies its source
// location: value = 1 + scan * width + pixel.
RasterImage coded_image(int width, int height) {
  RasterImage img(width, height, 65535);
  for (int s = 0; s < height; ++s)
    for (int p = 0; p < width; ++p)
      img.set(s, p, static_cast<Sample>(1 + s * width + p));
  return img;
}

WarpModel random_warp(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> shift(-6, 6), lin(-0.03, 0.03),
      quad(-1e-4, 1e-4);
  const std::vector<double> a{shift(rng), lin(rng), quad(rng), 1 + lin(rng), quad(rng), quad(rng)};
  const std::vector<double> b{shift(rng), 1 + lin(rng), quad(rng), lin(rng), quad(rng), quad(rng)};
  return WarpModel::from_raw(2, a, b);
}

// Test-only bilinear sampler, used to show what NN avoids.
RasterImage resample_bilinear(const RasterImage& src, const WarpModel& m) {
  RasterImage out(src.width(), src.height(), src.max_value());
  for (int s = 0; s < src.height(); ++s) {
    for (int p = 0; p < src.width(); ++p) {
      const Point2 q = m.evaluate(s, p);
      const int s0 = static_cast<int>(std::floor(q.scan));
      const int p0 = static_cast<int>(std::floor(q.pixel));
      if (s0 < 0 || p0 < 0 || s0 + 1 >= src.height() || p0 + 1 >= src.width()) continue;
      const double fs = q.scan - s0, fp = q.pixel - p0;
      const double v = (1 - fs) * ((1 - fp) * src.at(s0, p0) + fp * src.at(s0, p0 + 1)) +
                       fs * ((1 - fp) * src.at(s0 + 1, p0) + fp * src.at(s0 + 1, p0 + 1));
      out.set(s, p, static_cast<Sample>(std::lround(v)));
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("resample") {

TEST_CASE("rounding is half away from zero") {
  CHECK(round_half_away(2.5) == 3);
  CHECK(round_half_away(-2.5) == -3);
  CHECK(round_half_away(0.49999) == 0);
  CHECK(round_half_away(-0.5) == -1);
}

TEST_CASE("identity model reproduces the sensed image") {
  std::mt19937_64 rng(2);
  const auto img = testing::random_image(rng, 37, 23, 1023);
  CHECK(resample_nn(img, WarpModel(2), 37, 23) == img);
  CHECK(resample_nn(img, WarpModel(1), 37, 23, 0, 4) == img);
}

TEST_CASE("a feature found 4 scans early is put back on its reference scan") {
  RasterImage sensed = RasterImage::filled(700, 500, 1023, 100);
  sensed.set(457, 652, 900);
  const auto out = resample_nn(sensed, WarpModel::shift(-4, 0), 700, 500);
  CHECK(out.at(461, 652) == 900);
  CHECK(out.at(457, 652) == 100);
}

TEST_CASE("output size follows the request, not the sensed image") {
  std::mt19937_64 rng(3);
  const auto img = testing::random_image(rng, 20, 10, 255);
  const auto out = resample_nn(img, WarpModel(1), 33, 7, 5);
  CHECK(out.width() == 33);
  CHECK(out.height() == 7);
  CHECK(out.at(0, 25) == 5);
  CHECK(out.at(6, 19) == img.at(6, 19));
}

TEST_CASE("fill value above the sensed range is rejected") {
  RasterImage img(4, 4, 255);
  CHECK_THROWS_AS(resample_nn(img, WarpModel(1), 4, 4, 300), Error);
}

TEST_CASE("integer translation places every pixel exactly") {
  std::mt19937_64 rng(4);
  const auto img = testing::random_image(rng, 40, 30, 1023);
  for (auto [ds, dp] : {std::pair{3, -2}, std::pair{-5, 7}, std::pair{0, 11}}) {
    // Output (s, p) reads sensed (s + ds, p + dp); the oracle shifts the
    // other way.
    const auto out = resample_nn(img, WarpModel::shift(ds, dp), 40, 30, 0);
    CHECK(out == testing::translate(img, -ds, -dp, 0));
  }
}

TEST_CASE("random warps copy only existing grey values, within half a pixel") {
  std::mt19937_64 rng(5);
  const int w = 120, h = 90;
  const auto img = coded_image(w, h);
  for (int t = 0; t < 20; ++t) {
    const auto m = random_warp(rng);
    const auto out = resample_nn(img, m, w, h, 0);
    std::size_t placed = 0;
    for (int s = 0; s < h; ++s) {
      for (int p = 0; p < w; ++p) {
        const Sample v = out.at(s, p);
        const Point2 exact = m.evaluate(s, p);
        if (v == 0) {
          const bool inside = std::round(exact.scan) >= 0 && std::round(exact.scan) < h &&
                              std::round(exact.pixel) >= 0 && std::round(exact.pixel) < w;
          CHECK_FALSE(inside);
          continue;
        }
        ++placed;
        const int src_s = (v - 1) / w, src_p = (v - 1) % w;
        CHECK(std::abs(src_s - exact.scan) <= 0.5);
        CHECK(std::abs(src_p - exact.pixel) <= 0.5);
      }
    }
    CHECK(placed > static_cast<std::size_t>(w * h / 2));
  }
}

TEST_CASE("row-parallel output is identical to sequential output") {
  std::mt19937_64 rng(6);
  const auto img = testing::random_image(rng, 64, 61, 1023);
  const auto m = random_warp(rng);
  const auto seq = resample_nn(img, m, 64, 61, 0, 1);
  for (unsigned t : {2u, 3u, 7u, 16u}) CHECK(resample_nn(img, m, 64, 61, 0, t) == seq);
}

TEST_CASE("radiometry of an identity registration") {
  std::mt19937_64 rng(7);
  const auto img = testing::random_image(rng, 50, 40, 1023);
  const auto rep = radiometry_report(img, resample_nn(img, WarpModel(1), 50, 40));
  CHECK(rep.tv_distance == 0.0);
  CHECK(rep.new_value_count == 0);
}

TEST_CASE("radiometry of a pure shift is bounded by the lost border") {
  std::mt19937_64 rng(8);
  RasterImage img = testing::random_image(rng, 60, 50, 1023);
  for (int s = 0; s < img.height(); ++s)
    for (auto& v : img.mutable_row(s)) v = std::max<Sample>(v, 1);
  const auto out = resample_nn(img, WarpModel::shift(3, -2), 60, 50, 0);
  const auto rep = radiometry_report(img, out, 0);
  const double lost = 60.0 * 50 - (50.0 - 3) * (60.0 - 2);
  CHECK(rep.new_value_count == 0);
  CHECK(rep.fill_pixels == static_cast<std::size_t>(lost));
  CHECK(rep.tv_distance <= lost / (60.0 * 50) + 1e-12);
}

TEST_CASE("a bilinear sampler invents grey values that NN does not") {
  std::mt19937_64 rng(9);
  RasterImage img(80, 80, 1023);
  // Sparse grey levels leave room for interpolated values to be new.
  std::uniform_int_distribution<int> d(1, 10);
  for (int s = 0; s < 80; ++s)
    for (int p = 0; p < 80; ++p) img.set(s, p, static_cast<Sample>(d(rng) * 90));
  const auto m = WarpModel::from_raw(1, {0.4, 0.0, 1.0}, {0.3, 1.0, 0.0});
  const auto nn = radiometry_report(img, resample_nn(img, m, 80, 80, 0));
  const auto bl = radiometry_report(img, resample_bilinear(img, m));
  CHECK(nn.new_value_count == 0);
  CHECK(bl.new_value_count > 0);
}

}
