#include "gcpreg/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gcpreg {

namespace {

void require_same_size(const Window& r, const Window& s) {
  if (r.side != s.side || r.samples.size() != s.samples.size()) {
    throw Error(ErrorCode::SizeMismatch,
                "windows differ in size: " + std::to_string(r.side) + " vs " +
                    std::to_string(s.side));
  }
}

void require_bins(int bins) {
  if (bins < 2) {
    throw Error(ErrorCode::InvalidArgument, "histogram needs at least 2 bins");
  }
}

bool is_flat(const Window& w) {
  auto [lo, hi] = std::minmax_element(w.samples.begin(), w.samples.end());
  return lo == w.samples.end() || *lo == *hi;
}

std::uint64_t sum_of_squares(const std::vector<std::uint32_t>& counts) {
  std::uint64_t acc = 0;
  for (auto c : counts) acc += static_cast<std::uint64_t>(c) * c;
  return acc;
}

}  // namespace

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::Ssd: return "ssd";
    case Measure::Ncc: return "ncc";
    case Measure::Cra: return "cra";
    case Measure::Mi: return "mi";
  }
  return "?";
}

Measure parse_measure(std::string_view name) {
  if (name == "ssd" || name == "msd") return Measure::Ssd;
  if (name == "ncc") return Measure::Ncc;
  if (name == "cra") return Measure::Cra;
  if (name == "mi") return Measure::Mi;
  throw Error(ErrorCode::InvalidArgument,
              "unknown measure '" + std::string(name) + "'");
}

JointHistogram::JointHistogram(const Window& r, const Window& s, int bins)
    : bins_(bins) {
  require_same_size(r, s);
  require_bins(bins);
  joint_.assign(static_cast<std::size_t>(bins) * bins, 0);
  ref_.assign(bins, 0);
  sensed_.assign(bins, 0);
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const int k = sample_bin(r.samples[i], r.max_value, bins);
    const int l = sample_bin(s.samples[i], s.max_value, bins);
    ++joint_[static_cast<std::size_t>(k) * bins + l];
    ++ref_[k];
    ++sensed_[l];
  }
  total_ = r.samples.size();
}

double entropy_bits(const std::vector<std::uint32_t>& counts,
                    std::uint64_t total) {
  if (total == 0) return 0.0;
  const double inv = 1.0 / static_cast<double>(total);
  double h = 0.0;
  for (auto c : counts) {
    if (c == 0) continue;
    const double p = c * inv;
    h -= p * std::log2(p);
  }
  return h;
}

double JointHistogram::ref_entropy() const { return entropy_bits(ref_, total_); }
double JointHistogram::sensed_entropy() const {
  return entropy_bits(sensed_, total_);
}
double JointHistogram::joint_entropy() const {
  return entropy_bits(joint_, total_);
}

double ssd(const Window& r, const Window& s) {
  require_same_size(r, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const double d = static_cast<double>(r.samples[i]) - s.samples[i];
    acc += d * d;
  }
  return acc;
}

std::optional<double> try_ncc(const Window& r, const Window& s) {
  require_same_size(r, s);
  if (is_flat(r) || is_flat(s)) return std::nullopt;
  const double n = static_cast<double>(r.samples.size());
  double sum_r = 0.0;
  double sum_s = 0.0;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    sum_r += r.samples[i];
    sum_s += s.samples[i];
  }
  const double mean_r = sum_r / n;
  const double mean_s = sum_s / n;
  double srs = 0.0;
  double srr = 0.0;
  double sss = 0.0;
  for (std::size_t i = 0; i < r.samples.size(); ++i) {
    const double dr = r.samples[i] - mean_r;
    const double ds = s.samples[i] - mean_s;
    srs += dr * ds;
    srr += dr * dr;
    sss += ds * ds;
  }
  const double value = srs / std::sqrt(srr * sss);
  return std::clamp(value, -1.0, 1.0);
}

double ncc(const Window& r, const Window& s) {
  require_same_size(r, s);
  if (is_flat(r)) {
    throw Error(ErrorCode::ZeroVariance, "ZeroVariance: reference window");
  }
  if (is_flat(s)) {
    throw Error(ErrorCode::ZeroVariance, "ZeroVariance: sensed window");
  }
  return *try_ncc(r, s);
}

std::optional<double> try_cra(const Window& r, const Window& s, int bins) {
  JointHistogram hist(r, s, bins);
  const std::uint64_t p = hist.total();
  const std::uint64_t p2 = p * p;
  const std::uint64_t h_r = sum_of_squares(hist.ref_marginal());
  const std::uint64_t h_s = sum_of_squares(hist.sensed_marginal());
  if (h_r == p2 && h_s == p2) return std::nullopt;
  const double phi = static_cast<double>(sum_of_squares(hist.joint()));
  const double f =
      std::sqrt(static_cast<double>(h_r) * static_cast<double>(h_s));
  const double f_over_p2 = f / static_cast<double>(p2);
  return (phi / f - f_over_p2) / (1.0 - f_over_p2);
}

double cra(const Window& r, const Window& s, int bins) {
  auto v = try_cra(r, s, bins);
  if (!v) {
    throw Error(ErrorCode::DegenerateHistogram,
                "DegenerateHistogram: both windows occupy a single bin");
  }
  return *v;
}

double mutual_information(const Window& r, const Window& s, int bins) {
  JointHistogram hist(r, s, bins);
  const double mi =
      hist.ref_entropy() + hist.sensed_entropy() - hist.joint_entropy();
  return std::max(mi, 0.0);
}

std::optional<double> try_measure(Measure m, const Window& r, const Window& s,
                                  int bins) {
  switch (m) {
    case Measure::Ssd: return ssd(r, s);
    case Measure::Ncc: return try_ncc(r, s);
    case Measure::Cra: return try_cra(r, s, bins);
    case Measure::Mi: return mutual_information(r, s, bins);
  }
  return std::nullopt;
}

}  // namespace gcpreg
