#include "doctest.h"

#include <atomic>
#include <numeric>

#include "gcpreg/core.hpp"
#include "helpers.hpp"

using namespace gcpreg;

TEST_SUITE("core") {

TEST_CASE("raster image invariants are enforced") {
  CHECK_THROWS_AS(RasterImage(0, 3, 255), Error);
  CHECK_THROWS_AS(RasterImage(2, 2, 255, {1, 2, 3}), Error);
  CHECK_THROWS_AS(RasterImage(2, 1, 10, {3, 11}), Error);
  RasterImage img(2, 1, 1023, {1023, 0});
  CHECK(img.at(0, 0) == 1023);
  CHECK_THROWS_AS(img.set(0, 1, 1024), Error);
}

TEST_CASE("extract_window on a 3x3 image centred returns the whole image") {
  RasterImage img(3, 3, 255, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  const Window w = extract_window(img, {1, 1}, 3);
  CHECK(w.side == 3);
  CHECK(w.samples == std::vector<Sample>{1, 2, 3, 4, 5, 6, 7, 8, 9});
}

TEST_CASE("extract_window rejects windows that leave the image") {
  RasterImage img(3, 3, 255);
  try {
    extract_window(img, {0, 0}, 3);
    FAIL("expected OutOfBounds");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::OutOfBounds);
  }
  CHECK_THROWS_AS(extract_window(img, {1, 1}, 2), Error);
}

TEST_CASE("extract_window on a row-major ramp") {
  std::vector<Sample> s(25);
  std::iota(s.begin(), s.end(), Sample{0});
  RasterImage img(5, 5, 255, s);
  const Window w = extract_window(img, {2, 2}, 3);
  CHECK(w.samples == std::vector<Sample>{6, 7, 8, 11, 12, 13, 16, 17, 18});
}

TEST_CASE("extract_window is a pure read") {
  std::mt19937_64 rng(3);
  const RasterImage img = testing::random_image(rng, 9, 7, 1023);
  const RasterImage before = img;
  const Window a = extract_window(img, {3, 4}, 5);
  const Window b = extract_window(img, {3, 4}, 5);
  CHECK(a == b);
  CHECK(img == before);
  // Row-major (scan, pixel): element (r, c) is img(scan - 2 + r, pixel - 2 + c).
  CHECK(a.at(0, 4) == img.at(1, 6));
  CHECK(a.at(4, 0) == img.at(5, 2));
}

TEST_CASE("parallel_for visits every index once for any worker count") {
  for (unsigned threads : {1u, 2u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(101);
    parallel_for(hits.size(), threads, [&](std::size_t i) { ++hits[i]; });
    for (auto& h : hits) CHECK(h.load() == 1);
  }
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](std::size_t i) {
                                 if (i == 7) throw Error(ErrorCode::Io, "x");
                               }),
                  Error);
}

}
