#include "gcpreg/core.hpp"

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

namespace gcpreg {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::DegenerateHistogram: return "DegenerateHistogram";
    case ErrorCode::GcpOutOfBounds: return "GcpOutOfBounds";
    case ErrorCode::EmptyGcpList: return "EmptyGcpList";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::InsufficientPoints: return "InsufficientPoints";
    case ErrorCode::DegenerateGeometry: return "DegenerateGeometry";
    case ErrorCode::NonInvertibleSpec: return "NonInvertibleSpec";
    case ErrorCode::DisplacementBound: return "DisplacementBound";
    case ErrorCode::CanvasTooSmall: return "CanvasTooSmall";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::TruncatedData: return "TruncatedData";
    case ErrorCode::UnsupportedMaxValue: return "UnsupportedMaxValue";
    case ErrorCode::MalformedLine: return "MalformedLine";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

InsufficientPointsError::InsufficientPointsError(std::size_t needed,
                                                 std::size_t got)
    : Error(ErrorCode::InsufficientPoints,
            "InsufficientPoints: need " + std::to_string(needed) +
                " matched points, got " + std::to_string(got)),
      needed_(needed),
      got_(got) {}

MalformedLineError::MalformedLineError(std::size_t line,
                                       const std::string& reason)
    : Error(ErrorCode::MalformedLine,
            "MalformedLine at line " + std::to_string(line) + ": " + reason),
      line_(line),
      reason_(reason) {}

RasterImage::RasterImage(int width, int height, Sample max_value)
    : RasterImage(width, height, max_value,
                  std::vector<Sample>(static_cast<std::size_t>(
                      std::max(width, 0)) * std::max(height, 0))) {}

RasterImage::RasterImage(int width, int height, Sample max_value,
                         std::vector<Sample> samples)
    : width_(width),
      height_(height),
      max_value_(max_value),
      samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "image dimensions must be at least 1x1");
  }
  if (samples_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(ErrorCode::SizeMismatch,
                "sample count does not equal width x height");
  }
  auto bad = std::find_if(samples_.begin(), samples_.end(),
                          [&](Sample s) { return s > max_value_; });
  if (bad != samples_.end()) {
    throw Error(ErrorCode::InvalidArgument,
                "sample " + std::to_string(*bad) + " exceeds max_value " +
                    std::to_string(max_value_));
  }
}

RasterImage RasterImage::filled(int width, int height, Sample max_value,
                                Sample value) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidArgument,
                "image dimensions must be at least 1x1");
  }
  return RasterImage(width, height, max_value,
                     std::vector<Sample>(
                         static_cast<std::size_t>(width) * height, value));
}

void RasterImage::set(int scan, int pixel, Sample value) {
  if (value > max_value_) {
    throw Error(ErrorCode::InvalidArgument, "sample exceeds max_value");
  }
  samples_[index(scan, pixel)] = value;
}

bool window_fits(const RasterImage& img, PixelCoord center, int side) {
  const int half = side / 2;
  return center.scan - half >= 0 && center.pixel - half >= 0 &&
         center.scan + half < img.height() &&
         center.pixel + half < img.width();
}

Window extract_window(const RasterImage& img, PixelCoord center, int side) {
  if (side < 1 || side % 2 == 0) {
    throw Error(ErrorCode::InvalidArgument, "window side must be odd");
  }
  if (!window_fits(img, center, side)) {
    throw Error(ErrorCode::OutOfBounds,
                "window of side " + std::to_string(side) + " at (" +
                    std::to_string(center.scan) + "," +
                    std::to_string(center.pixel) + ") leaves the image");
  }
  Window w;
  extract_window_into(img, center, side, w);
  return w;
}

void extract_window_into(const RasterImage& img, PixelCoord center, int side,
                         Window& out) {
  const int half = side / 2;
  out.side = side;
  out.max_value = img.max_value();
  out.samples.resize(static_cast<std::size_t>(side) * side);
  auto dst = out.samples.begin();
  for (int r = 0; r < side; ++r) {
    auto src = img.row(center.scan - half + r)
                   .subspan(static_cast<std::size_t>(center.pixel - half),
                            side);
    dst = std::copy(src.begin(), src.end(), dst);
  }
}

unsigned default_thread_count() {
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = default_thread_count();
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }

  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  workers.reserve(threads);
  const std::size_t block = (n + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = t * block;
    const std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    workers.emplace_back([&, begin, end] {
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace gcpreg
