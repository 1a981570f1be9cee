#include "doctest.h"

#include <numeric>

#include "gcpreg/synth.hpp"
#include "helpers.hpp"

using namespace gcpreg;

namespace {

RasterImage coded_image(int width, int height) {
  RasterImage img(width, height, 65535);
  for (int s = 0; s < height; ++s)
    for (int p = 0; p < width; ++p)
      img.set(s, p, static_cast<Sample>(1 + s * width + p));
  return img;
}

ErrorCode code_of(const RasterImage& ref, const DistortionSpec& spec) {
  try {
    generate_sensed(ref, spec);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Io;
}

MatchResult exact_match(const std::string& id, PixelCoord at, Offset off) {
  MatchResult r;
  r.gcp_id = id;
  r.ref_coord = at;
  r.offset = off;
  r.sensed_coord = at + off;
  return r;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("portable rng follows the documented construction") {
  PortableRng rng(42);
  std::mt19937_64 oracle(42);
  for (int i = 0; i < 100; ++i)
    CHECK(rng.uniform() == static_cast<double>(oracle() >> 11) / 9007199254740992.0);
  PortableRng a(7), b(7);
  for (int i = 0; i < 50; ++i) {
    CHECK(a.normal() == b.normal());
    CHECK(a.below(17) < 17);
    b.below(17);
  }
}

TEST_CASE("normals have unit spread") {
  PortableRng rng(3);
  double sum = 0, sq = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  CHECK(std::abs(sum / n) < 0.03);
  CHECK(std::abs(sq / n - 1.0) < 0.05);
}

TEST_CASE("textured reference is deterministic and spans the middle range") {
  const auto a = make_textured_reference(96, 80, 1023, 5);
  CHECK(a == make_textured_reference(96, 80, 1023, 5));
  CHECK_FALSE(a == make_textured_reference(96, 80, 1023, 6));
  const auto [lo, hi] = std::minmax_element(a.samples().begin(), a.samples().end());
  CHECK(*lo >= static_cast<Sample>(0.05 * 1023) - 1);
  CHECK(*hi <= static_cast<Sample>(0.95 * 1023) + 1);
  CHECK(*hi - *lo > 500);
}

TEST_CASE("zero shift without noise reproduces the reference") {
  const auto ref = make_textured_reference(64, 48, 1023, 1);
  const auto scene = generate_sensed(ref, DistortionSpec::shift(0, 0));
  CHECK(scene.sensed == ref);
  CHECK(scene.truth == WarpModel::shift(0, 0));
}

TEST_CASE("integer shift moves content by the shift") {
  const auto ref = make_textured_reference(64, 48, 1023, 2);
  const auto scene = generate_sensed(ref, DistortionSpec::shift(2, 3));
  CHECK(scene.sensed == testing::translate(ref, 2, 3, 0));
  CHECK(scene.truth.evaluate(10, 10) == Point2{12, 13});
}

TEST_CASE("same spec and seed give identical scenes") {
  const auto ref = make_textured_reference(80, 60, 1023, 3);
  auto spec = DistortionSpec::quadratic(
      {1.5, 1.0, 0.01, 1e-5, 2e-5, -1e-5, -2.0, -0.01, 1.0, 1e-5, 0.0, 2e-5});
  spec.noise_sigma = 12;
  spec.seed = 99;
  spec.occlusions.push_back({{30, 40}, 6, 1000});
  const auto a = generate_sensed(ref, spec);
  CHECK(a.sensed == generate_sensed(ref, spec).sensed);
  spec.seed = 100;
  CHECK_FALSE(a.sensed == generate_sensed(ref, spec).sensed);
}

TEST_CASE("quadratic builder orders parameters lexicographically") {
  const auto spec = DistortionSpec::quadratic(
      {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12});
  const auto& f = spec.forward;
  CHECK(f.a(0, 0) == 1);
  CHECK(f.a(1, 0) == 2);
  CHECK(f.a(0, 1) == 3);
  CHECK(f.a(1, 1) == 4);
  CHECK(f.a(2, 0) == 5);
  CHECK(f.a(0, 2) == 6);
  CHECK(f.b(1, 1) == 10);
  CHECK(f.b(0, 2) == 12);
  const auto aff = DistortionSpec::affine({1, 2, 3, 4, 5, 6});
  CHECK(aff.forward.evaluate(1, 1) == Point2{6, 15});
}

TEST_CASE("non-invertible and reflecting maps are rejected") {
  const auto ref = make_textured_reference(40, 40, 255, 4);
  CHECK(code_of(ref, DistortionSpec::affine({0, 1, 1, 0, 1, 1})) ==
        ErrorCode::NonInvertibleSpec);
  CHECK(code_of(ref, DistortionSpec::affine({0, -1, 0, 0, 0, 1})) ==
        ErrorCode::NonInvertibleSpec);
  // Fold inside the frame: d(scan)/dx = 1 - 0.1 x changes sign at x = 10.
  CHECK(code_of(ref, DistortionSpec::quadratic(
                         {0, 1, 0, 0, -0.05, 0, 0, 0, 1, 0, 0, 0})) ==
        ErrorCode::NonInvertibleSpec);
}

TEST_CASE("displacement bound") {
  const auto ref = make_textured_reference(40, 40, 255, 5);
  auto spec = DistortionSpec::shift(10, 0);
  spec.max_displacement = 5;
  CHECK(code_of(ref, spec) == ErrorCode::DisplacementBound);
  spec.max_displacement = 10;
  CHECK_NOTHROW(generate_sensed(ref, spec));
  CHECK(max_displacement(WarpModel::shift(3, -5), {40, 40}) == 5.0);
}

TEST_CASE("inverse map round-trips") {
  const auto f = DistortionSpec::quadratic(
                     {2, 1.01, 0.02, 1e-4, -5e-5, 3e-5, -3, -0.01, 0.98, 5e-5, 2e-5, -1e-4})
                     .forward;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 200);
  for (int t = 0; t < 100; ++t) {
    const Point2 q{u(rng), u(rng)};
    const auto p = invert_point(f, q);
    REQUIRE(p.has_value());
    const Point2 back = f.evaluate(*p);
    CHECK(std::abs(back.scan - q.scan) < 1e-9);
    CHECK(std::abs(back.pixel - q.pixel) < 1e-9);
  }
}

TEST_CASE("every sensed pixel comes from within half a pixel of its pre-image") {
  const int w = 120, h = 100;
  const auto ref = coded_image(w, h);
  const auto spec = DistortionSpec::quadratic(
      {3, 1.02, 0.01, 1e-4, -1e-4, 5e-5, -2, 0.015, 0.99, -5e-5, 1e-4, 1e-4});
  const auto scene = generate_sensed(ref, spec);
  std::size_t checked = 0;
  for (int s = 0; s < h; ++s) {
    for (int p = 0; p < w; ++p) {
      const Sample v = scene.sensed.at(s, p);
      if (v == 0) continue;
      const int rs = (v - 1) / w, rp = (v - 1) % w;
      // Forward-mapping the source pixel lands within the rounding cell of q.
      const Point2 fwd = scene.truth.evaluate(rs, rp);
      const Point2 pre = *invert_point(scene.truth, {double(s), double(p)});
      CHECK(std::abs(rs - pre.scan) <= 0.5);
      CHECK(std::abs(rp - pre.pixel) <= 0.5);
      CHECK(std::abs(fwd.scan - s) < 1.0);
      CHECK(std::abs(fwd.pixel - p) < 1.0);
      ++checked;
    }
  }
  CHECK(checked > static_cast<std::size_t>(w * h * 0.8));
}

TEST_CASE("noise and occlusions") {
  const auto ref = RasterImage::filled(100, 100, 1023, 500);
  auto spec = DistortionSpec::shift(0, 0);
  spec.noise_sigma = 20;
  spec.seed = 8;
  spec.occlusions.push_back({{50, 50}, 10, 1});
  const auto sensed = generate_sensed(ref, spec).sensed;
  double sum = 0, sq = 0;
  int n = 0;
  for (int s = 0; s < 100; ++s) {
    for (int p = 0; p < 100; ++p) {
      const double d2 = (s - 50.0) * (s - 50.0) + (p - 50.0) * (p - 50.0);
      if (d2 <= 100.0) {
        CHECK(sensed.at(s, p) == 1);
        continue;
      }
      if (d2 < 144.0) continue;
      const double e = sensed.at(s, p) - 500.0;
      sum += e;
      sq += e * e;
      ++n;
    }
  }
  CHECK(std::abs(sum / n) < 1.0);
  CHECK(std::sqrt(sq / n) == doctest::Approx(20.0).epsilon(0.05));
}

TEST_CASE("gcp placement") {
  const auto ref = make_textured_reference(200, 160, 1023, 9);
  const auto gcps = place_gcps(ref, 20, 25, 11);
  REQUIRE_FALSE(gcps.empty());
  CHECK(gcps.size() <= 20);
  CHECK(gcps.front().id == "G01");
  for (const auto& g : gcps) {
    CHECK(g.ref_coord.scan >= 25);
    CHECK(g.ref_coord.pixel >= 25);
    CHECK(g.ref_coord.scan < 160 - 25);
    CHECK(g.ref_coord.pixel < 200 - 25);
  }
  CHECK(place_gcps(ref, 20, 25, 11) == gcps);
  // A flat image has no usable texture anywhere.
  CHECK(place_gcps(RasterImage::filled(200, 160, 1023, 7), 20, 25, 11).empty());
}

TEST_CASE("score_run") {
  const auto truth = WarpModel::shift(2, -1);
  std::vector<MatchResult> ms;
  for (int i = 0; i < 8; ++i)
    ms.push_back(exact_match("G0" + std::to_string(i + 1), {20 + 10 * i, 30 + 7 * i}, {2, -1}));
  ms[5].status = MatchStatus::ZeroVariance;

  SUBCASE("exact model scores zero error") {
    const auto card = score_run(ms, truth, truth, "ncc", 0.25);
    CHECK(card.input_gcps == 8);
    CHECK(card.matched == 7);
    CHECK(card.census.count(MatchStatus::ZeroVariance) == 1);
    CHECK(card.rmse_scan == doctest::Approx(0.0));
    CHECK(card.rmse_pixel == doctest::Approx(0.0));
    CHECK(card.measure == "ncc");
    CHECK(card.seconds == 0.25);
  }
  SUBCASE("a biased model scores its bias") {
    const auto card = score_run(ms, WarpModel::shift(2.5, -1), truth, "ssd", 0);
    CHECK(card.rmse_scan == doctest::Approx(0.5));
    CHECK(card.rmse_pixel == doctest::Approx(0.0));
  }
  SUBCASE("no model leaves the error undefined") {
    const auto card = score_run(ms, std::nullopt, truth, "mi", 0);
    CHECK(std::isnan(card.rmse_scan));
  }
}

}
