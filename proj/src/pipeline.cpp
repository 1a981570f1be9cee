#include "gcpreg/pipeline.hpp"

#include <chrono>

namespace gcpreg {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

}  // namespace

Registration register_image(const RasterImage& ref, const RasterImage& sensed,
                            const std::vector<GroundControlPoint>& gcps,
                            const RegisterOptions& opts) {
  MatchConfig cfg = opts.match;
  cfg.threads = opts.threads;

  auto t0 = std::chrono::steady_clock::now();
  MatchSet matches = match_all(ref, sensed, gcps, cfg);
  const double match_s = seconds_since(t0);

  FitResult fit = fit_warp(matches.results, opts.degree);

  t0 = std::chrono::steady_clock::now();
  RasterImage registered = resample_nn(sensed, fit.model, ref.width(),
                                       ref.height(), opts.fill_value,
                                       opts.threads);
  const double resample_s = seconds_since(t0);

  RadiometryReport radiometry =
      radiometry_report(sensed, registered, opts.fill_value);
  return {std::move(matches), std::move(fit),      std::move(registered),
          radiometry,         match_s,             resample_s};
}

std::vector<MatchConfig> bench_modes(const MatchConfig& base) {
  std::vector<MatchConfig> modes;
  for (Measure m : {Measure::Mi, Measure::Cra, Measure::Ssd, Measure::Ncc}) {
    MatchConfig c = base;
    c.mode = MeasureMode::Single;
    c.single_measure = m;
    modes.push_back(c);
  }
  MatchConfig combined = base;
  combined.mode = MeasureMode::Combined;
  modes.push_back(combined);
  return modes;
}

std::vector<Scorecard> run_bench(const RasterImage& ref,
                                 const RasterImage& sensed,
                                 const std::vector<GroundControlPoint>& gcps,
                                 const std::vector<MatchConfig>& modes,
                                 int degree,
                                 const std::optional<WarpModel>& truth) {
  std::vector<Scorecard> rows;
  for (const auto& cfg : modes) {
    const auto t0 = std::chrono::steady_clock::now();
    const MatchSet ms = match_all(ref, sensed, gcps, cfg);
    std::optional<FitResult> fit;
    std::string fit_error;
    try {
      fit = fit_warp(ms.results, degree);
    } catch (const Error& e) {
      fit_error = e.what();
    }
    const double secs = seconds_since(t0);

    Scorecard card;
    if (truth) {
      card = score_run(ms.results,
                       fit ? std::optional<WarpModel>(fit->model) : std::nullopt,
                       *truth, cfg.label(), secs);
    } else {
      card.measure = cfg.label();
      card.census = ms.census;
      card.input_gcps = ms.census.input;
      card.matched = ms.census.matched();
      card.seconds = secs;
      if (fit) {
        card.rmse_scan = fit->report.rmse_scan;
        card.rmse_pixel = fit->report.rmse_pixel;
      }
    }
    card.fit_error = fit_error;
    rows.push_back(std::move(card));
  }
  return rows;
}

}  // namespace gcpreg
