#ifndef GCPREG_SIMILARITY_HPP
#define GCPREG_SIMILARITY_HPP

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "gcpreg/core.hpp"

namespace gcpreg {

enum class Measure { Ssd, Ncc, Cra, Mi };

std::string_view to_string(Measure m);
/// Accepts "ssd", "msd", "ncc", "cra", "mi". Throws InvalidArgument.
Measure parse_measure(std::string_view name);

/// SSD is minimised, the other three are maximised.
constexpr bool lower_is_better(Measure m) { return m == Measure::Ssd; }

inline constexpr int kDefaultBins = 64;

/// Bin index of a sample: floor(sample * bins / (max_value + 1)).
inline int sample_bin(Sample s, Sample max_value, int bins) {
  return static_cast<int>(static_cast<std::uint64_t>(s) * bins /
                          (static_cast<std::uint64_t>(max_value) + 1));
}

/// Joint grey-level histogram of two equal-sized windows, with its marginals.
/// Rows index the reference bin, columns the sensed bin.
class JointHistogram {
 public:
  JointHistogram(const Window& r, const Window& s, int bins);

  int bins() const noexcept { return bins_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint32_t count(int ref_bin, int sensed_bin) const {
    return joint_[static_cast<std::size_t>(ref_bin) * bins_ + sensed_bin];
  }
  const std::vector<std::uint32_t>& joint() const noexcept { return joint_; }
  const std::vector<std::uint32_t>& ref_marginal() const noexcept {
    return ref_;
  }
  const std::vector<std::uint32_t>& sensed_marginal() const noexcept {
    return sensed_;
  }

  /// Entropies in bits, 0 log 0 taken as 0.
  double ref_entropy() const;
  double sensed_entropy() const;
  double joint_entropy() const;

 private:
  int bins_;
  std::uint64_t total_ = 0;
  std::vector<std::uint32_t> joint_;
  std::vector<std::uint32_t> ref_;
  std::vector<std::uint32_t> sensed_;
};

/// Entropy in bits of a count histogram with the given total.
double entropy_bits(const std::vector<std::uint32_t>& counts,
                    std::uint64_t total);

/// Sum of squared differences. Throws SizeMismatch.
double ssd(const Window& r, const Window& s);

/// Zero-mean normalised cross-correlation in [-1, 1].
/// Throws ZeroVariance naming the flat window, SizeMismatch.
double ncc(const Window& r, const Window& s);
/// Non-throwing NCC: nullopt when either window is flat.
std::optional<double> try_ncc(const Window& r, const Window& s);

/// Cluster reward statistic of the joint histogram.
/// Throws DegenerateHistogram when both windows fall in a single bin.
double cra(const Window& r, const Window& s, int bins = kDefaultBins);
std::optional<double> try_cra(const Window& r, const Window& s,
                              int bins = kDefaultBins);

/// H(r) + H(s) - H(r,s) in bits. Never negative.
double mutual_information(const Window& r, const Window& s,
                          int bins = kDefaultBins);

/// Evaluates `m`; nullopt where the measure is undefined for the pair.
std::optional<double> try_measure(Measure m, const Window& r, const Window& s,
                                  int bins = kDefaultBins);

}  // namespace gcpreg

#endif  // GCPREG_SIMILARITY_HPP
