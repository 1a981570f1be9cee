#ifndef GCPREG_MATCHING_HPP
#define GCPREG_MATCHING_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gcpreg/core.hpp"
#include "gcpreg/similarity.hpp"

namespace gcpreg {

/// Square target window (side T) slid inside a square search window (side S).
/// Both odd, T < S; the offset radius is (S - T) / 2.
struct WindowSpec {
  int target_size = 11;
  int search_size = 31;

  int radius() const noexcept { return (search_size - target_size) / 2; }
  /// Throws InvalidArgument unless both sides are odd and 1 <= T < S.
  void validate() const;

  static WindowSpec vhrr() { return {11, 31}; }
  static WindowSpec ccd() { return {21, 101}; }

  friend bool operator==(const WindowSpec&, const WindowSpec&) = default;
};

/// How a GCP is declared matched.
enum class MeasureMode {
  Combined,  ///< NCC maximum and SSD minimum must agree.
  Single,    ///< One measure with its own acceptance threshold.
};

struct MatchConfig {
  WindowSpec windows = WindowSpec::vhrr();
  MeasureMode mode = MeasureMode::Combined;
  Measure single_measure = Measure::Ncc;
  double ncc_accept_threshold = 0.5;
  /// Single SSD mode: accepts when sqrt(SSD / (T*T)) is at most this
  /// fraction of max_value.
  double ssd_accept_rms_fraction = 0.1;
  /// Single CRA mode: accepts when the statistic reaches this. Unrelated
  /// textured 11x11 windows rarely exceed 0.27 at 64 bins.
  double cra_accept_threshold = 0.3;
  /// Single MI mode: accepts when MI / H(target) reaches this.
  double mi_accept_ratio = 0.5;
  bool edge_preprocess = false;
  int bins = kDefaultBins;
  unsigned threads = 1;

  void validate() const;
  /// Short label used in reports: "ncc+msd" or the single measure name.
  std::string label() const;
};

/// Scores for every offset in [-R, R]^2, row-major by (d_scan, d_pixel).
class SimilaritySurface {
 public:
  SimilaritySurface(Measure measure, int radius);

  Measure measure() const noexcept { return measure_; }
  int radius() const noexcept { return radius_; }
  int side() const noexcept { return 2 * radius_ + 1; }

  bool valid(Offset o) const { return valid_[index(o)] != 0; }
  double score(Offset o) const { return scores_[index(o)]; }
  void set(Offset o, std::optional<double> value);

  std::size_t valid_count() const;
  const std::vector<double>& scores() const noexcept { return scores_; }

  /// Optimal valid offset. Ties go to the smallest |offset|, then to the
  /// first offset in row-major order. nullopt when no offset is valid.
  std::optional<Offset> best() const;

 private:
  std::size_t index(Offset o) const {
    return static_cast<std::size_t>(o.scan + radius_) * side() +
           (o.pixel + radius_);
  }

  Measure measure_;
  int radius_;
  std::vector<double> scores_;
  std::vector<std::uint8_t> valid_;
};

enum class MatchStatus {
  Matched,
  OutOfBounds,
  ZeroVariance,
  CriterionDisagreement,
  LowScore,
};
inline constexpr std::size_t kMatchStatusCount = 5;

std::string_view to_string(MatchStatus s);
MatchStatus parse_match_status(std::string_view s);

struct MatchResult {
  std::string gcp_id;
  PixelCoord ref_coord;
  PixelCoord sensed_coord;
  Offset offset;
  /// NaN where undefined (flat window, skipped GCP).
  double ncc_score = 0.0;
  double ssd_score = 0.0;
  /// Value of the deciding measure (NCC in combined mode).
  double score = 0.0;
  MatchStatus status = MatchStatus::Matched;

  bool matched() const noexcept { return status == MatchStatus::Matched; }

  /// Field-wise; two NaN scores compare equal.
  friend bool operator==(const MatchResult& x, const MatchResult& y) {
    auto same = [](double a, double b) {
      return a == b || (std::isnan(a) && std::isnan(b));
    };
    return x.gcp_id == y.gcp_id && x.ref_coord == y.ref_coord &&
           x.sensed_coord == y.sensed_coord && x.offset == y.offset &&
           same(x.ncc_score, y.ncc_score) && same(x.ssd_score, y.ssd_score) &&
           same(x.score, y.score) && x.status == y.status;
  }
};

struct MatchCensus {
  std::size_t input = 0;
  std::array<std::size_t, kMatchStatusCount> by_status{};

  std::size_t matched() const { return by_status[0]; }
  std::size_t unmatched() const { return input - matched(); }
  std::size_t count(MatchStatus s) const {
    return by_status[static_cast<std::size_t>(s)];
  }
};

struct MatchSet {
  std::vector<MatchResult> results;
  MatchCensus census;
};

MatchCensus tally(const std::vector<MatchResult>& results);

/// Slides the target window at gcp.ref_coord in `ref` over the search window
/// at the same coordinates in `sensed`. Throws GcpOutOfBounds.
SimilaritySurface build_surface(const RasterImage& ref,
                                const RasterImage& sensed,
                                const GroundControlPoint& gcp,
                                const MatchConfig& cfg, Measure measure);

/// Matches one GCP. Never throws for out-of-bounds GCPs; reports them.
MatchResult match_gcp(const RasterImage& ref, const RasterImage& sensed,
                      const GroundControlPoint& gcp, const MatchConfig& cfg);

/// Matches every GCP, output in input order. Throws EmptyGcpList.
MatchSet match_all(const RasterImage& ref, const RasterImage& sensed,
                   const std::vector<GroundControlPoint>& gcps,
                   const MatchConfig& cfg);

/// 3x3 Sobel gradient magnitude |gx| + |gy|, clamped to max_value.
/// Borders replicate the nearest pixel. Throws TooSmall below 3x3.
RasterImage edge_extract(const RasterImage& img);

}  // namespace gcpreg

#endif  // GCPREG_MATCHING_HPP
