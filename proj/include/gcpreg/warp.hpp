#ifndef GCPREG_WARP_HPP
#define GCPREG_WARP_HPP

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/matching.hpp"

namespace gcpreg {

inline constexpr int kMinDegree = 1;
inline constexpr int kMaxDegree = 4;
inline constexpr int kDefaultDegree = 2;

/// Number of monomials x^i y^j with i + j <= degree: (N+1)(N+2)/2.
constexpr std::size_t monomial_count(int degree) {
  return static_cast<std::size_t>(degree + 1) * (degree + 2) / 2;
}

/// Exponent pairs (i, j) in lexicographic order: (0,0), (0,1), ..., (N,0).
std::vector<std::pair<int, int>> monomial_exponents(int degree);

/// Affine rescale applied to reference coordinates before the monomials are
/// formed: u = (scan - scan_center) / scan_scale, likewise for pixel.
struct Normalization {
  double scan_center = 0.0;
  double scan_scale = 1.0;
  double pixel_center = 0.0;
  double pixel_scale = 1.0;

  static Normalization identity() { return {}; }
  /// Maps the bounding box of `points` onto [-1, 1]^2.
  static Normalization fit_box(std::span<const Point2> points);

  Point2 apply(Point2 p) const {
    return {(p.scan - scan_center) / scan_scale,
            (p.pixel - pixel_center) / pixel_scale};
  }

  friend bool operator==(const Normalization&, const Normalization&) = default;
};

/// Bivariate polynomial map from reference (scan, pixel) to sensed
/// (scan, pixel). Coefficients live in the normalized frame and are indexed
/// by monomial_exponents(degree).
class WarpModel {
 public:
  WarpModel() : WarpModel(1) {}
  /// Identity map of the given degree.
  explicit WarpModel(int degree);
  WarpModel(int degree, Normalization norm, std::vector<double> scan_coeffs,
            std::vector<double> pixel_coeffs);

  /// Coefficients given directly in the original reference frame
  /// (a_ij for scan, b_ij for pixel), lexicographic (i, j) order.
  static WarpModel from_raw(int degree, std::vector<double> a,
                            std::vector<double> b);
  static WarpModel shift(double d_scan, double d_pixel);

  int degree() const noexcept { return degree_; }
  const Normalization& normalization() const noexcept { return norm_; }
  const std::vector<double>& scan_coeffs() const noexcept { return scan_; }
  const std::vector<double>& pixel_coeffs() const noexcept { return pixel_; }

  /// a_ij and b_ij re-expanded in the original reference frame.
  std::vector<double> raw_scan_coeffs() const;
  std::vector<double> raw_pixel_coeffs() const;

  /// Raw coefficient for exponent (i, j); throws InvalidArgument if i+j > N.
  double a(int i, int j) const;
  double b(int i, int j) const;

  Point2 evaluate(Point2 ref) const;
  Point2 evaluate(double scan, double pixel) const {
    return evaluate(Point2{scan, pixel});
  }

  /// Reference-frame box of the fitted points, if the model was fitted.
  const std::optional<std::pair<Point2, Point2>>& domain() const noexcept {
    return domain_;
  }
  void set_domain(Point2 lo, Point2 hi) { domain_ = std::make_pair(lo, hi); }
  /// True when `ref` lies outside the fitted domain.
  bool extrapolates(Point2 ref) const;

  friend bool operator==(const WarpModel& x, const WarpModel& y) {
    return x.degree_ == y.degree_ && x.norm_ == y.norm_ &&
           x.scan_ == y.scan_ && x.pixel_ == y.pixel_;
  }

 private:
  int degree_;
  Normalization norm_;
  std::vector<double> scan_;
  std::vector<double> pixel_;
  std::optional<std::pair<Point2, Point2>> domain_;
};

/// One correspondence: reference location and where it was found in the
/// sensed image.
struct PointPair {
  Point2 ref;
  Point2 sensed;
};

std::vector<PointPair> matched_pairs(const std::vector<MatchResult>& matches);

struct FitOptions {
  /// Every k-th pair (k > 1) is held out of the fit and scored separately.
  /// 0 disables the split.
  std::size_t holdout_every = 0;
};

struct Residual {
  std::string id;
  double scan = 0.0;
  double pixel = 0.0;
};

struct FitReport {
  int degree = kDefaultDegree;
  double rmse_scan = 0.0;
  double rmse_pixel = 0.0;
  /// Observed minus predicted, one per fit point.
  std::vector<Residual> residuals;
  std::size_t matched_count = 0;
  std::size_t input_count = 0;
  /// Ratio of extreme singular values of the normalized design matrix.
  double condition_number = 1.0;
  double seconds = 0.0;
  std::optional<double> holdout_rmse_scan;
  std::optional<double> holdout_rmse_pixel;
  std::size_t holdout_count = 0;
};

struct FitResult {
  WarpModel model;
  FitReport report;
};

/// Least-squares fit of a degree-N polynomial per axis.
/// Throws InsufficientPointsError, DegenerateGeometry.
FitResult fit_warp(std::span<const PointPair> pairs, int degree,
                   const FitOptions& opts = {},
                   std::span<const std::string> ids = {});

/// Fit over the matched entries of a match table. input_count in the
/// report is the full table size.
FitResult fit_warp(const std::vector<MatchResult>& matches, int degree,
                   const FitOptions& opts = {});

struct DegreeOutcome {
  int degree = 0;
  std::optional<FitReport> report;
  std::string error;
};

/// Fits each degree in [min_degree, max_degree]; failures are recorded.
std::vector<DegreeOutcome> degree_sweep(std::span<const PointPair> pairs,
                                        int min_degree = kMinDegree,
                                        int max_degree = kMaxDegree);

/// Root-mean-square of the per-axis values.
double rms(std::span<const double> values);

}  // namespace gcpreg

#endif  // GCPREG_WARP_HPP
