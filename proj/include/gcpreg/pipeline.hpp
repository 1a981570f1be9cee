#ifndef GCPREG_PIPELINE_HPP
#define GCPREG_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/matching.hpp"
#include "gcpreg/resample.hpp"
#include "gcpreg/synth.hpp"
#include "gcpreg/warp.hpp"

namespace gcpreg {

struct RegisterOptions {
  MatchConfig match;
  int degree = kDefaultDegree;
  Sample fill_value = 0;
  /// Worker count for matching and resampling; 0 means all cores.
  unsigned threads = 1;
};

struct Registration {
  MatchSet matches;
  FitResult fit;
  RasterImage registered;
  RadiometryReport radiometry;
  double match_seconds = 0.0;
  double resample_seconds = 0.0;
};

/// Match -> least-squares fit -> nearest-neighbour resample onto the
/// reference grid. Throws InsufficientPointsError / DegenerateGeometry.
Registration register_image(const RasterImage& ref, const RasterImage& sensed,
                            const std::vector<GroundControlPoint>& gcps,
                            const RegisterOptions& opts);

/// The matching modes compared by a bench run: MI, CRA, SSD and NCC alone,
/// and the combined NCC+MSD criterion.
std::vector<MatchConfig> bench_modes(const MatchConfig& base);

/// Runs every mode on one scene. With a ground truth the RMSE is model vs
/// truth; otherwise it is the fit residual RMSE.
std::vector<Scorecard> run_bench(const RasterImage& ref,
                                 const RasterImage& sensed,
                                 const std::vector<GroundControlPoint>& gcps,
                                 const std::vector<MatchConfig>& modes,
                                 int degree,
                                 const std::optional<WarpModel>& truth);

}  // namespace gcpreg

#endif  // GCPREG_PIPELINE_HPP
