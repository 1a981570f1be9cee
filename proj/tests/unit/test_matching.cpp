#include "doctest.h"

#include "gcpreg/matching.hpp"
#include "gcpreg/synth.hpp"
#include "helpers.hpp"

using namespace gcpreg;

namespace {

RasterImage scene(int size = 160, std::uint64_t seed = 7) {
  return make_textured_reference(size, size, 255, seed);
}

void paint_disc(RasterImage& img, PixelCoord c, int radius, Sample v) {
  for (int s = c.scan - radius; s <= c.scan + radius; ++s) {
    for (int p = c.pixel - radius; p <= c.pixel + radius; ++p) {
      if (img.contains(s, p) &&
          (s - c.scan) * (s - c.scan) + (p - c.pixel) * (p - c.pixel) <=
              radius * radius) {
        img.set(s, p, v);
      }
    }
  }
}

std::vector<GroundControlPoint> grid(int n, int lo, int hi) {
  std::vector<GroundControlPoint> out;
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      out.push_back({"G" + std::to_string(++k),
                     {lo + (hi - lo) * i / (n - 1), lo + (hi - lo) * j / (n - 1)}});
    }
  }
  return out;
}

}  // namespace

TEST_SUITE("matching") {

TEST_CASE("window spec validation and presets") {
  CHECK(WindowSpec::vhrr().target_size == 11);
  CHECK(WindowSpec::vhrr().search_size == 31);
  CHECK(WindowSpec::vhrr().radius() == 10);
  CHECK(WindowSpec::ccd().target_size == 21);
  CHECK(WindowSpec::ccd().search_size == 101);
  CHECK(WindowSpec::ccd().radius() == 40);
  CHECK_THROWS_AS((WindowSpec{10, 31}.validate()), Error);
  CHECK_THROWS_AS((WindowSpec{11, 30}.validate()), Error);
  CHECK_THROWS_AS((WindowSpec{31, 31}.validate()), Error);
  CHECK_THROWS_AS((WindowSpec{31, 11}.validate()), Error);
  MatchConfig bad;
  bad.ncc_accept_threshold = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("surface of identical images has zero SSD at the origin") {
  const auto img = scene();
  MatchConfig cfg;
  const auto s = build_surface(img, img, {"g", {80, 80}}, cfg, Measure::Ssd);
  CHECK(s.side() == 21);
  CHECK(s.radius() == 10);
  CHECK(s.valid_count() == 441);
  CHECK(s.score({0, 0}) == 0.0);
  CHECK(s.best() == Offset{0, 0});
}

TEST_CASE("surface of a translated image equals the brute-force SSD grid") {
  const auto ref = scene();
  const auto sensed = testing::translate(ref, 2, 3);
  MatchConfig cfg;
  const PixelCoord g{80, 70};
  const auto s = build_surface(ref, sensed, {"g", g}, cfg, Measure::Ssd);
  const auto s0 = build_surface(ref, ref, {"g", g}, cfg, Measure::Ssd);
  const int R = 10, h = 5;
  for (int ds = -R; ds <= R; ++ds) {
    for (int dp = -R; dp <= R; ++dp) {
      double want = 0.0;
      for (int u = -h; u <= h; ++u) {
        for (int v = -h; v <= h; ++v) {
          const double d = double(ref.at(g.scan + u, g.pixel + v)) -
                           sensed.at(g.scan + ds + u, g.pixel + dp + v);
          want += d * d;
        }
      }
      CHECK(s.score({ds, dp}) == want);
      if (std::abs(ds - 2) <= R && std::abs(dp - 3) <= R) {
        CHECK(s.score({ds, dp}) == s0.score({ds - 2, dp - 3}));
      }
    }
  }
  CHECK(s.best() == Offset{2, 3});
}

TEST_CASE("build_surface rejects GCPs whose windows leave the images") {
  const auto img = scene(64);
  MatchConfig cfg;
  try {
    build_surface(img, img, {"edge", {2, 30}}, cfg, Measure::Ncc);
    FAIL("expected GcpOutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::GcpOutOfBounds);
  }
  // Target fits (needs 5) but search (needs 15) does not.
  CHECK_THROWS_AS(build_surface(img, img, {"g", {10, 30}}, cfg, Measure::Ssd),
                  Error);
  CHECK_NOTHROW(build_surface(img, img, {"g", {15, 15}}, cfg, Measure::Ssd));
}

TEST_CASE("ties go to the smallest offset, then row-major order") {
  SimilaritySurface s(Measure::Ncc, 2);
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) s.set({a, b}, 0.1);
  s.set({2, 2}, 0.9);
  s.set({1, 0}, 0.9);
  s.set({0, -2}, 0.9);
  CHECK(s.best() == Offset{1, 0});
  s.set({-1, 0}, 0.9);
  s.set({0, 1}, 0.9);
  CHECK(s.best() == Offset{-1, 0});
  s.set({0, 0}, 0.9);
  CHECK(s.best() == Offset{0, 0});

  SimilaritySurface low(Measure::Ssd, 1);
  low.set({1, 1}, 3.0);
  low.set({-1, 1}, 3.0);
  CHECK(low.best() == Offset{-1, 1});
  SimilaritySurface none(Measure::Ncc, 1);
  CHECK_FALSE(none.best().has_value());
}

TEST_CASE("match_gcp on identical images") {
  const auto img = scene();
  const auto r = match_gcp(img, img, {"g", {60, 90}}, MatchConfig{});
  CHECK(r.matched());
  CHECK(r.offset == Offset{0, 0});
  CHECK(r.sensed_coord == PixelCoord{60, 90});
  CHECK(r.ncc_score == doctest::Approx(1.0));
  CHECK(r.ssd_score == 0.0);
}

TEST_CASE("a cloud over the GCP neighbourhood leaves it unmatched") {
  const auto ref = scene();
  auto sensed = ref;
  paint_disc(sensed, {80, 80}, 24, 250);
  const auto r = match_gcp(ref, sensed, {"g", {80, 80}}, MatchConfig{});
  CHECK_FALSE(r.matched());
  CHECK(r.status == MatchStatus::ZeroVariance);

  // A smaller cloud leaves partial texture in the search window.
  auto partial = ref;
  paint_disc(partial, {80, 80}, 9, 250);
  const auto p = match_gcp(ref, partial, {"g", {80, 80}}, MatchConfig{});
  CHECK_FALSE(p.matched());
}

TEST_CASE("combined criterion refuses split optima") {
  std::mt19937_64 rng(99);
  const auto noise = testing::random_image(rng, 60, 60, 1023);
  RasterImage ref = RasterImage::filled(60, 60, 1023, 0);
  RasterImage sensed = noise;
  const PixelCoord g{30, 30};
  // Target texture in [100, 300].
  std::uniform_int_distribution<int> d(100, 300);
  for (int u = -2; u <= 2; ++u)
    for (int v = -2; v <= 2; ++v) {
      const auto t = static_cast<Sample>(d(rng));
      ref.set(g.scan + u, g.pixel + v, t);
      // Exact copy with one bright outlier at the origin...
      sensed.set(g.scan + u, g.pixel + v, t);
      // ...and a brightness-scaled copy six pixels right.
      sensed.set(g.scan + u, g.pixel + 6 + v, static_cast<Sample>(2 * t + 10));
    }
  sensed.set(g.scan, g.pixel, 1023);

  MatchConfig cfg;
  cfg.windows = {5, 19};
  const auto ncc_best =
      build_surface(ref, sensed, {"g", g}, cfg, Measure::Ncc).best();
  const auto ssd_best =
      build_surface(ref, sensed, {"g", g}, cfg, Measure::Ssd).best();
  REQUIRE(ncc_best == Offset{0, 6});
  REQUIRE(ssd_best == Offset{0, 0});
  const auto r = match_gcp(ref, sensed, {"g", g}, cfg);
  CHECK(r.status == MatchStatus::CriterionDisagreement);
  CHECK_FALSE(r.matched());
}

TEST_CASE("combined criterion rejects a low NCC peak") {
  std::mt19937_64 rng(5);
  const auto ref = testing::random_image(rng, 80, 80, 255);
  const auto sensed = testing::random_image(rng, 80, 80, 255);
  MatchConfig cfg;
  cfg.ncc_accept_threshold = 0.99;
  const auto r = match_gcp(ref, sensed, {"g", {40, 40}}, cfg);
  CHECK_FALSE(r.matched());
  CHECK((r.status == MatchStatus::LowScore ||
         r.status == MatchStatus::CriterionDisagreement));
}

TEST_CASE("match_all on identical images matches all 29 GCPs at zero offset") {
  const auto img = scene(256);
  const auto gcps = place_gcps(img, 29, 20, 11);
  REQUIRE(gcps.size() == 29);
  const auto ms = match_all(img, img, gcps, MatchConfig{});
  CHECK(ms.census.input == 29);
  CHECK(ms.census.matched() == 29);
  for (std::size_t i = 0; i < gcps.size(); ++i) {
    CHECK(ms.results[i].gcp_id == gcps[i].id);
    CHECK(ms.results[i].offset == Offset{0, 0});
  }
}

TEST_CASE("match_all with three occluded GCPs out of 26") {
  const auto ref = scene(256, 17);
  const auto gcps = place_gcps(ref, 26, 20, 11);
  REQUIRE(gcps.size() == 26);
  auto sensed = ref;
  for (std::size_t k : {3u, 11u, 20u}) paint_disc(sensed, gcps[k].ref_coord, 22, 240);
  const auto ms = match_all(ref, sensed, gcps, MatchConfig{});
  CHECK(ms.census.matched() == 23);
  CHECK(ms.census.unmatched() == 3);
  for (std::size_t k : {3u, 11u, 20u}) CHECK_FALSE(ms.results[k].matched());
}

TEST_CASE("a GCP near the edge is skipped without affecting others") {
  const auto img = scene(128);
  std::vector<GroundControlPoint> gcps{{"a", {40, 40}}, {"edge", {2, 60}},
                                       {"b", {80, 90}}};
  const auto ms = match_all(img, img, gcps, MatchConfig{});
  CHECK(ms.results[0].matched());
  CHECK(ms.results[1].status == MatchStatus::OutOfBounds);
  CHECK(ms.results[2].matched());
  CHECK(ms.census.count(MatchStatus::OutOfBounds) == 1);
}

TEST_CASE("match_all rejects an empty GCP list") {
  const auto img = scene(64);
  try {
    match_all(img, img, {}, MatchConfig{});
    FAIL("expected EmptyGcpList");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyGcpList);
  }
}

TEST_CASE("translation covariance over random shifts") {
  const auto ref = scene(200, 23);
  const auto gcps = grid(4, 40, 160);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> d(-7, 7);
  for (int t = 0; t < 6; ++t) {
    const int ds = d(rng), dp = d(rng);
    const auto sensed = testing::translate(ref, ds, dp);
    const auto ms = match_all(ref, sensed, gcps, MatchConfig{});
    CHECK(ms.census.matched() == gcps.size());
    for (const auto& r : ms.results) CHECK(r.offset == Offset{ds, dp});
  }
}

TEST_CASE("ncc optimum is invariant to a positive affine brightness change") {
  const auto ref = scene(120, 3);
  const auto sensed = testing::translate(ref, -3, 4);
  RasterImage bright(sensed.width(), sensed.height(), 1023);
  for (int s = 0; s < sensed.height(); ++s)
    for (int p = 0; p < sensed.width(); ++p)
      bright.set(s, p, static_cast<Sample>(3 * sensed.at(s, p) + 7));
  for (const auto& g : grid(3, 30, 90)) {
    const auto a = build_surface(ref, sensed, g, MatchConfig{}, Measure::Ncc).best();
    const auto b = build_surface(ref, bright, g, MatchConfig{}, Measure::Ncc).best();
    CHECK(a == b);
  }
}

TEST_CASE("match_all is identical for any worker count") {
  const auto ref = scene(200, 29);
  const auto sensed = testing::translate(ref, 3, -2);
  const auto gcps = grid(5, 30, 170);
  MatchConfig cfg;
  const auto one = match_all(ref, sensed, gcps, cfg);
  cfg.threads = 4;
  const auto four = match_all(ref, sensed, gcps, cfg);
  REQUIRE(one.results.size() == four.results.size());
  for (std::size_t i = 0; i < one.results.size(); ++i) {
    CHECK(one.results[i].gcp_id == four.results[i].gcp_id);
    CHECK(one.results[i].offset == four.results[i].offset);
    CHECK(one.results[i].ncc_score == four.results[i].ncc_score);
    CHECK(one.results[i].ssd_score == four.results[i].ssd_score);
  }
}

TEST_CASE("single-measure modes match identical images at zero offset") {
  const auto img = scene(120, 13);
  for (Measure m : {Measure::Ssd, Measure::Ncc, Measure::Cra, Measure::Mi}) {
    MatchConfig cfg;
    cfg.mode = MeasureMode::Single;
    cfg.single_measure = m;
    const auto r = match_gcp(img, img, {"g", {60, 60}}, cfg);
    CAPTURE(to_string(m));
    CHECK(r.matched());
    CHECK(r.offset == Offset{0, 0});
  }
}

TEST_CASE("single-measure modes recover a shift") {
  const auto ref = scene(120, 19);
  const auto sensed = testing::translate(ref, 4, -5);
  for (Measure m : {Measure::Ssd, Measure::Ncc, Measure::Cra, Measure::Mi}) {
    MatchConfig cfg;
    cfg.mode = MeasureMode::Single;
    cfg.single_measure = m;
    const auto r = match_gcp(ref, sensed, {"g", {60, 60}}, cfg);
    CAPTURE(to_string(m));
    CHECK(r.matched());
    CHECK(r.offset == Offset{4, -5});
  }
}

TEST_CASE("edge extraction") {
  SUBCASE("constant image has no edges") {
    const auto e = edge_extract(RasterImage::filled(6, 5, 255, 77));
    for (Sample s : e.samples()) CHECK(s == 0);
  }
  SUBCASE("vertical step") {
    RasterImage step(8, 5, 1023);
    for (int s = 0; s < 5; ++s)
      for (int p = 4; p < 8; ++p) step.set(s, p, 100);
    const auto e = edge_extract(step);
    for (int s = 0; s < 5; ++s) {
      for (int p = 0; p < 8; ++p) {
        CAPTURE(p);
        CHECK(e.at(s, p) == ((p == 3 || p == 4) ? 400 : 0));
      }
    }
  }
  SUBCASE("response clamps to max_value") {
    RasterImage step(6, 4, 255);
    for (int s = 0; s < 4; ++s)
      for (int p = 3; p < 6; ++p) step.set(s, p, 255);
    const auto e = edge_extract(step);
    CHECK(e.at(1, 2) == 255);
    CHECK(e.at(1, 0) == 0);
  }
  SUBCASE("too small") {
    try {
      edge_extract(RasterImage(2, 5, 255));
      FAIL("expected TooSmall");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooSmall);
    }
  }
}

TEST_CASE("edge-preprocessed matching gives the same offsets on identical inputs") {
  const auto img = scene(160, 37);
  const auto gcps = grid(3, 40, 120);
  MatchConfig raw;
  MatchConfig edges;
  edges.edge_preprocess = true;
  const auto a = match_all(img, img, gcps, raw);
  const auto b = match_all(img, img, gcps, edges);
  for (std::size_t i = 0; i < gcps.size(); ++i) {
    CHECK(a.results[i].offset == b.results[i].offset);
    CHECK(b.results[i].matched());
  }
  // match_gcp honours the flag on its own.
  CHECK(match_gcp(img, img, gcps[0], edges).matched());
}

}
