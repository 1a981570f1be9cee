#ifndef GCPREG_IO_HPP
#define GCPREG_IO_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/matching.hpp"
#include "gcpreg/overlay.hpp"
#include "gcpreg/resample.hpp"
#include "gcpreg/synth.hpp"
#include "gcpreg/warp.hpp"

namespace gcpreg::io {

namespace fs = std::filesystem;

// Numbers. Locale-independent, shortest round-trip form.
std::string format_double(double v);
double parse_double(std::string_view s);
long long parse_int(std::string_view s);

// Images. Layouts are documented in docs/FORMATS.md.

/// Binary portable graymap (P5). 1 byte per sample when max_value <= 255,
/// otherwise 2 bytes big-endian.
std::string encode_pgm(const RasterImage& img);
RasterImage decode_pgm(std::string_view bytes);

/// Little-endian 16-bit samples; metadata lives in the sidecar text.
std::string encode_raw(const RasterImage& img);
std::string encode_raw_sidecar(const RasterImage& img);
RasterImage decode_raw(std::string_view bytes, std::string_view sidecar);
fs::path sidecar_path(const fs::path& raw_path);

/// Dispatches on extension: ".raw" uses raw + sidecar, anything else PGM.
RasterImage read_image(const fs::path& path);
void write_image(const RasterImage& img, const fs::path& path);

// GCPs and matches. Comma-separated, '#' comments, blank lines skipped.

std::vector<GroundControlPoint> parse_gcps(std::istream& in);
std::vector<GroundControlPoint> read_gcps(const fs::path& path);
void format_gcps(std::ostream& out, const std::vector<GroundControlPoint>& g);
void write_gcps(const std::vector<GroundControlPoint>& g, const fs::path& path);

inline constexpr std::string_view kMatchHeader =
    "id,ref_scan,ref_pixel,sensed_scan,sensed_pixel,d_scan,d_pixel,ncc,ssd,"
    "score,status";

void format_matches(std::ostream& out, const std::vector<MatchResult>& m);
std::vector<MatchResult> parse_matches(std::istream& in);
void write_matches(const std::vector<MatchResult>& m, const fs::path& path);
std::vector<MatchResult> read_matches(const fs::path& path);

// Key-value text ("key value" per line, '#' comments).

void format_model(std::ostream& out, const WarpModel& model);
WarpModel parse_model(std::istream& in);
void write_model(const WarpModel& model, const fs::path& path);
WarpModel read_model(const fs::path& path);

void format_spec(std::ostream& out, const DistortionSpec& spec);
DistortionSpec parse_spec(std::istream& in);
void write_spec(const DistortionSpec& spec, const fs::path& path);
DistortionSpec read_spec(const fs::path& path);

// Reports.

void format_fit_report_text(std::ostream& out, const FitReport& rep,
                            bool with_timing = true);
void format_fit_report_kv(std::ostream& out, const FitReport& rep,
                          bool with_timing = true);
void format_degree_sweep(std::ostream& out,
                         const std::vector<DegreeOutcome>& sweep);
void format_radiometry(std::ostream& out, const RadiometryReport& rep);

/// Table with columns measure, input GCPs, matched, RMSE (scan, pixel),
/// time. Timing prints as "-" when disabled.
void format_scorecards_text(std::ostream& out,
                            const std::vector<Scorecard>& rows,
                            bool with_timing = true);
void format_scorecards_tsv(std::ostream& out,
                           const std::vector<Scorecard>& rows,
                           bool with_timing = true);

// Boundaries.

/// "P" starts a polyline, "scan pixel" lines add vertices, a blank line
/// ends it. An optional "frame <label>" line names the frame.
BoundaryPolyline parse_polylines(std::istream& in);
void format_polylines(std::ostream& out, const BoundaryPolyline& lines);
BoundaryPolyline read_polylines(const fs::path& path);
void write_polylines(const BoundaryPolyline& lines, const fs::path& path);

/// target_scan,target_pixel,source_scan,source_pixel per line.
std::vector<ManualPair> parse_pairs(std::istream& in);
std::vector<ManualPair> read_pairs(const fs::path& path);
void write_pairs(const std::vector<ManualPair>& pairs, const fs::path& path);

// Whole-file helpers.
std::string read_file(const fs::path& path);
void write_file(const fs::path& path, std::string_view bytes);

}  // namespace gcpreg::io

#endif  // GCPREG_IO_HPP
