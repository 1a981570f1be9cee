#ifndef GCPREG_SYNTH_HPP
#define GCPREG_SYNTH_HPP

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/matching.hpp"
#include "gcpreg/warp.hpp"

namespace gcpreg {

/// Seeded generator with a fixed algorithm: std::mt19937_64 for bits,
/// 53-bit uniforms, Box-Muller normals. Output is identical on every
/// conforming platform.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Standard normal.
  double normal();

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

enum class DistortionKind { Shift, Affine, Quadratic };

std::string_view to_string(DistortionKind k);
DistortionKind parse_distortion_kind(std::string_view s);

/// Flat disc written into the sensed image after warping.
struct Occlusion {
  Point2 center;
  double radius = 0.0;
  Sample value = 0;

  friend bool operator==(const Occlusion&, const Occlusion&) = default;
};

/// Ground-truth reference->sensed distortion plus degradations.
struct DistortionSpec {
  DistortionKind kind = DistortionKind::Shift;
  /// Forward map f (reference -> sensed), raw frame.
  WarpModel forward = WarpModel::shift(0.0, 0.0);
  double noise_sigma = 0.0;
  std::vector<Occlusion> occlusions;
  std::uint64_t seed = 0;
  /// Largest allowed per-axis displacement |f(p) - p| over the frame.
  double max_displacement = std::numeric_limits<double>::infinity();

  static DistortionSpec shift(double d_scan, double d_pixel);
  /// (a00, a10, a01, b00, b10, b01): scan = a00 + a10*x + a01*y, and so on.
  static DistortionSpec affine(const std::array<double, 6>& p);
  /// (a00, a10, a01, a11, a20, a02, b00, b10, b01, b11, b20, b02).
  static DistortionSpec quadratic(const std::array<double, 12>& p);
};

struct SynthScene {
  RasterImage sensed;
  /// f: reference -> sensed. Matches at GCP p are expected at f(p).
  WarpModel truth;
};

/// Band-limited random texture: several octaves of bilinearly interpolated
/// lattice noise, scaled to span most of [0, max_value].
RasterImage make_textured_reference(int width, int height, Sample max_value,
                                    std::uint64_t seed);

/// Largest per-axis displacement of `f` over the frame, sampled on a grid
/// with the given step (corners always included).
double max_displacement(const WarpModel& f, Extent frame, int step = 8);

/// sensed(q) = ref(round(f^-1(q))), then noise, then occlusions. Pixels whose
/// pre-image leaves the reference are 0.
/// Throws NonInvertibleSpec, DisplacementBound.
SynthScene generate_sensed(const RasterImage& ref, const DistortionSpec& spec);

/// Solves f(p) = q by Newton iteration from q - (f(q) - q).
std::optional<Point2> invert_point(const WarpModel& f, Point2 q);

/// Up to `count` GCPs on a uniform grid inside `margin`, skipping
/// neighbourhoods whose target-window standard deviation is below
/// `min_stddev`. Ids are G01, G02, ...
std::vector<GroundControlPoint> place_gcps(const RasterImage& img,
                                           std::size_t count, int margin,
                                           int target_size,
                                           double min_stddev = 4.0);

/// One row of a Table-1 style comparison.
struct Scorecard {
  std::string measure;
  std::size_t input_gcps = 0;
  std::size_t matched = 0;
  /// Model vs ground truth at the matched GCP reference locations.
  double rmse_scan = std::numeric_limits<double>::quiet_NaN();
  double rmse_pixel = std::numeric_limits<double>::quiet_NaN();
  double seconds = 0.0;
  MatchCensus census;
  std::string fit_error;
};

Scorecard score_run(const std::vector<MatchResult>& matches,
                    const std::optional<WarpModel>& model,
                    const WarpModel& ground_truth, std::string measure_label,
                    double seconds);

}  // namespace gcpreg

#endif  // GCPREG_SYNTH_HPP
