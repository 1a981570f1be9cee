#ifndef GCPREG_CORE_HPP
#define GCPREG_CORE_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gcpreg {

/// Radiometric sample. Wide enough for 10-bit VHRR and 16-bit raw products.
using Sample = std::uint16_t;

enum class ErrorCode {
  OutOfBounds,
  SizeMismatch,
  InvalidArgument,
  ZeroVariance,
  DegenerateHistogram,
  GcpOutOfBounds,
  EmptyGcpList,
  TooSmall,
  InsufficientPoints,
  DegenerateGeometry,
  NonInvertibleSpec,
  DisplacementBound,
  CanvasTooSmall,
  MalformedHeader,
  TruncatedData,
  UnsupportedMaxValue,
  MalformedLine,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InsufficientPointsError : public Error {
 public:
  InsufficientPointsError(std::size_t needed, std::size_t got);

  std::size_t needed() const noexcept { return needed_; }
  std::size_t got() const noexcept { return got_; }

 private:
  std::size_t needed_;
  std::size_t got_;
};

/// Parse failure with a 1-based line number.
class MalformedLineError : public Error {
 public:
  MalformedLineError(std::size_t line, const std::string& reason);

  std::size_t line() const noexcept { return line_; }
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

/// Integer image location. `scan` is the row, `pixel` the column.
struct PixelCoord {
  int scan = 0;
  int pixel = 0;

  friend bool operator==(const PixelCoord&, const PixelCoord&) = default;
};

/// Integer displacement in (scan, pixel) order.
struct Offset {
  int scan = 0;
  int pixel = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
};

inline PixelCoord operator+(PixelCoord c, Offset o) {
  return {c.scan + o.scan, c.pixel + o.pixel};
}

/// Real-valued location in (scan, pixel) order.
struct Point2 {
  double scan = 0.0;
  double pixel = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

/// Image size in (scan, pixel) order: height first.
struct Extent {
  int height = 0;
  int width = 0;

  friend bool operator==(const Extent&, const Extent&) = default;
};

/// Row-major grid of samples. Immutable in the pipeline once loaded.
class RasterImage {
 public:
  RasterImage() = default;

  /// Zero-filled image.
  RasterImage(int width, int height, Sample max_value);

  /// Takes ownership of `samples`; validates the count and the sample range.
  RasterImage(int width, int height, Sample max_value,
              std::vector<Sample> samples);

  /// Constant image.
  static RasterImage filled(int width, int height, Sample max_value,
                            Sample value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Sample max_value() const noexcept { return max_value_; }
  Extent extent() const noexcept { return {height_, width_}; }
  bool empty() const noexcept { return samples_.empty(); }

  bool contains(int scan, int pixel) const noexcept {
    return scan >= 0 && scan < height_ && pixel >= 0 && pixel < width_;
  }
  bool contains(PixelCoord c) const noexcept {
    return contains(c.scan, c.pixel);
  }

  Sample at(int scan, int pixel) const {
    return samples_[index(scan, pixel)];
  }
  Sample at(PixelCoord c) const { return at(c.scan, c.pixel); }

  /// Writes one sample. Throws InvalidArgument above max_value.
  void set(int scan, int pixel, Sample value);

  std::span<const Sample> samples() const noexcept { return samples_; }
  std::span<const Sample> row(int scan) const noexcept {
    return std::span<const Sample>(samples_).subspan(
        static_cast<std::size_t>(scan) * width_, width_);
  }
  /// Mutable row access for producers. Callers keep samples <= max_value.
  std::span<Sample> mutable_row(int scan) noexcept {
    return std::span<Sample>(samples_).subspan(
        static_cast<std::size_t>(scan) * width_, width_);
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t index(int scan, int pixel) const noexcept {
    return static_cast<std::size_t>(scan) * width_ + pixel;
  }

  int width_ = 0;
  int height_ = 0;
  Sample max_value_ = 0;
  std::vector<Sample> samples_;
};

/// Square, odd-sided patch of samples copied out of an image.
struct Window {
  int side = 0;
  Sample max_value = 0;
  std::vector<Sample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  Sample at(int r, int c) const { return samples[r * side + c]; }

  friend bool operator==(const Window&, const Window&) = default;
};

struct GroundControlPoint {
  std::string id;
  PixelCoord ref_coord;

  friend bool operator==(const GroundControlPoint&,
                         const GroundControlPoint&) = default;
};

/// True when the odd `side` window centred at `center` fits inside `img`.
bool window_fits(const RasterImage& img, PixelCoord center, int side);

/// Copies the side x side neighbourhood of `center`. Throws OutOfBounds.
Window extract_window(const RasterImage& img, PixelCoord center, int side);

/// Same as extract_window but reuses `out`'s storage. No bounds check.
void extract_window_into(const RasterImage& img, PixelCoord center, int side,
                         Window& out);

/// Worker count used when a caller asks for 0 threads.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) across `threads` workers. Work is split in
/// contiguous blocks; body must write only to index-owned state.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace gcpreg

#endif  // GCPREG_CORE_HPP
