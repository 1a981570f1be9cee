#ifndef GCPREG_TESTS_HELPERS_HPP
#define GCPREG_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "gcpreg/core.hpp"

namespace gcpreg::testing {

inline Window make_window(int side, Sample max_value,
                          std::vector<Sample> samples) {
  return Window{side, max_value, std::move(samples)};
}

inline Window random_window(std::mt19937_64& rng, int side, Sample max_value,
                            bool allow_flat = false) {
  std::uniform_int_distribution<int> d(0, max_value);
  Window w{side, max_value, std::vector<Sample>(side * side)};
  do {
    for (auto& s : w.samples) s = static_cast<Sample>(d(rng));
  } while (!allow_flat &&
           std::all_of(w.samples.begin(), w.samples.end(),
                       [&](Sample s) { return s == w.samples[0]; }));
  return w;
}

inline RasterImage ramp_image(int width, int height, Sample max_value = 65535) {
  std::vector<Sample> s(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < s.size(); ++i) {
    s[i] = static_cast<Sample>(i % (static_cast<std::size_t>(max_value) + 1));
  }
  return RasterImage(width, height, max_value, std::move(s));
}

inline RasterImage random_image(std::mt19937_64& rng, int width, int height,
                                Sample max_value) {
  std::uniform_int_distribution<int> d(0, max_value);
  std::vector<Sample> s(static_cast<std::size_t>(width) * height);
  for (auto& v : s) v = static_cast<Sample>(d(rng));
  return RasterImage(width, height, max_value, std::move(s));
}

/// out(s, p) = img(s - ds, p - dp), `fill` where that leaves the image.
inline RasterImage translate(const RasterImage& img, int ds, int dp,
                             Sample fill = 0) {
  RasterImage out(img.width(), img.height(), img.max_value());
  for (int s = 0; s < img.height(); ++s) {
    for (int p = 0; p < img.width(); ++p) {
      out.set(s, p, img.contains(s - ds, p - dp) ? img.at(s - ds, p - dp) : fill);
    }
  }
  return out;
}

// Brute-force histogram statistics over (bin_r, bin_s) pairs, kept
// independent of the library's JointHistogram.
struct BruteHist {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> ref;
  std::map<int, double> sensed;
  double total = 0.0;
};

inline BruteHist brute_hist(const Window& r, const Window& s, int bins) {
  BruteHist h;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const int k = static_cast<int>(std::floor(
        static_cast<double>(r.samples[i]) * bins / (r.max_value + 1.0)));
    const int l = static_cast<int>(std::floor(
        static_cast<double>(s.samples[i]) * bins / (s.max_value + 1.0)));
    h.joint[{k, l}] += 1;
    h.ref[k] += 1;
    h.sensed[l] += 1;
    h.total += 1;
  }
  return h;
}

template <typename Map>
double brute_entropy(const Map& m, double total) {
  double h = 0.0;
  for (const auto& [k, c] : m) {
    const double p = c / total;
    if (p > 0) h -= p * std::log(p) / std::log(2.0);
  }
  return h;
}

inline double brute_mi(const Window& r, const Window& s, int bins) {
  const auto h = brute_hist(r, s, bins);
  return brute_entropy(h.ref, h.total) + brute_entropy(h.sensed, h.total) -
         brute_entropy(h.joint, h.total);
}

inline double brute_cra(const Window& r, const Window& s, int bins) {
  const auto h = brute_hist(r, s, bins);
  double phi = 0, hr = 0, hs = 0;
  for (const auto& [k, c] : h.joint) phi += c * c;
  for (const auto& [k, c] : h.ref) hr += c * c;
  for (const auto& [k, c] : h.sensed) hs += c * c;
  const double p2 = h.total * h.total;
  const double f = std::sqrt(hr * hs);
  return (phi / f - f / p2) / (1 - f / p2);
}

// Direct monomial expansion sum a_ij x^i y^j, for checking model evaluation.
inline double brute_poly(const std::vector<double>& coeffs, int degree,
                         double x, double y) {
  double acc = 0.0;
  std::size_t k = 0;
  for (int i = 0; i <= degree; ++i) {
    for (int j = 0; j <= degree - i; ++j) {
      acc += coeffs[k++] * std::pow(x, i) * std::pow(y, j);
    }
  }
  return acc;
}

}  // namespace gcpreg::testing

#endif  // GCPREG_TESTS_HELPERS_HPP
